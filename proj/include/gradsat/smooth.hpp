#pragma once

#include <cstdint>
#include <vector>

#include "gradsat/interface_map.hpp"
#include "gradsat/ir.hpp"

namespace gradsat {

using SNodeId = std::uint32_t;
inline constexpr SNodeId kInvalidSNode = 0xffffffffu;

struct SmoothParams {
  double beta = 1000.0;
  double eps = 1e-4;    // feasibility slack: constraints mean expr >= -eps
  double K = 100.0;     // sentinel magnitude for pinned Boolean values
  double mu = 1e-9;     // guard for division / sqrt near singularities
  double delta() const { return 0.1 / beta; }
};

enum class SKind : std::uint8_t { Var, Const, Op };
enum class SOp : std::uint8_t { Add, Sub, Mul, Div, Neg, Sin, Cos, Sqrt, Tanh, Exp, Sigmoid };

struct SNode {
  SKind kind{SKind::Const};
  SOp op{SOp::Add};
  std::uint8_t nargs{0};
  std::uint32_t var{0};  // optimization-variable index (SKind::Var)
  double value{0.0};     // SKind::Const payload
  SNodeId a{kInvalidSNode};
  SNodeId b{kInvalidSNode};
};

// Optimization-variable layout: program real unknowns first, then one
// variable per relaxed Boolean unknown, in first-encounter order.
struct VarLayout {
  std::uint32_t n_reals = 0;
  std::vector<std::uint32_t> relaxed_holes;  // Boolean-unknown slots

  std::uint32_t total() const {
    return n_reals + static_cast<std::uint32_t>(relaxed_holes.size());
  }
  int var_for_hole(std::uint32_t y) const {
    for (std::size_t i = 0; i < relaxed_holes.size(); ++i)
      if (relaxed_holes[i] == y) return static_cast<int>(n_reals + i);
    return -1;
  }
};

struct ConstraintProv {
  enum Kind : std::uint8_t {
    Assert,     // index = position in Program::asserts
    PinTrue,    // node = pinned Boolean node
    PinFalse,   // node = pinned Boolean node
    HoleLo,     // relaxation box: x >= 0      (index = slot)
    HoleHi,     // relaxation box: 1 - x >= 0  (index = slot)
    HoleTight   // delta - x(1-x) >= 0         (index = slot)
  } kind = Assert;
  NodeId node = kInvalidNode;
  std::uint32_t index = 0;
};

struct SmoothConstraint {
  SNodeId expr;  // satisfied when value >= -eps
  ConstraintProv prov;
};

struct SmoothSet {
  SmoothParams params;
  std::vector<SNode> nodes;
  std::vector<SmoothConstraint> constraints;
  VarLayout layout;
  // Per program Boolean node: its smoothed sign-distance before any interface
  // pin replaced it with a sentinel. Used to rank suggestion candidates.
  std::vector<SNodeId> bool_smooth;
};

// Shared scalar semantics for smoothed operators; the plain evaluator and the
// derivative evaluator both go through this, so their values are identical.
double sop_value(SOp op, double a, double b, const SmoothParams& prm);
// Partial derivatives of sop_value with respect to a and b.
void sop_partials(SOp op, double a, double b, double v, const SmoothParams& prm, double& da,
                  double& db);

double sigmoid(double beta, double x);

// Builds the smoothed constraint system for program `p` under interface `I`.
SmoothSet abstract_num(const Program& p, const InterfaceMap& I, const SmoothParams& params);

// Dense forward value pass; writes one value per smooth node.
void eval_smooth(const SmoothSet& set, const double* sigma, std::vector<double>& values);

}  // namespace gradsat
