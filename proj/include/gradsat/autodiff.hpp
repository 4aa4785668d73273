#pragma once

#include <cstdint>
#include <vector>

#include "gradsat/smooth.hpp"

namespace gradsat {

// Forward-mode workspace, reused across calls to avoid reallocation.
// grad is node-major: grad[node * nvars + k] = d value[node] / d sigma[k].
struct GradWorkspace {
  std::vector<double> values;
  std::vector<double> grad;
  std::uint32_t nvars = 0;
  std::uint64_t node_visits = 0;  // instrumentation: total nodes processed

  const double* grad_row(SNodeId n) const { return grad.data() + std::size_t(n) * nvars; }
};

// Evaluates values and gradients for every node in one topological pass.
// Values are computed by the same scalar routines as eval_smooth, so they are
// bit-identical to a plain value pass. Returns the first node whose value is
// non-finite, or kInvalidSNode on success (gradients of later nodes are then
// unreliable and the caller should treat the point as invalid).
SNodeId eval_with_grad(const SmoothSet& set, const double* sigma, GradWorkspace& ws);

}  // namespace gradsat
