#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "gradsat/autodiff.hpp"
#include "gradsat/interface_map.hpp"
#include "gradsat/ir.hpp"
#include "gradsat/smooth.hpp"

namespace gradsat {

struct OptimizerConfig {
  std::vector<double> beta_schedule{1.0, 5.0, 25.0, 125.0};
  double hard_beta = 1000.0;  // final sharpening stage, also the feasibility gate
  int max_iters = 150;        // per beta stage
  double eps = 1e-4;          // constraints mean expr >= -eps
  double penalty_weight = 1.0;
  double armijo_c = 1e-4;
  int max_linesearch = 64;  // enough octaves to tame a cliff from a unit step
  double grad_tol = 1e-10;
  bool quasi_newton = true;
  int lbfgs_memory = 8;
  // Independent random initializations per call (after the warm start, when
  // one is supplied). Deceptive landscapes put most single draws into the
  // same misleading attractor; a few extra draws make the call robust while
  // costing nothing when the first attempt succeeds.
  int num_restarts = 4;
  std::uint64_t seed = 0;
  double init_lo = -10.0;  // initialization box for unbounded real unknowns
  double init_hi = 10.0;
  // Wall-clock cutoff; the default epoch value means no limit. Checked once
  // per iteration, so a run may overshoot by at most one gradient step.
  std::chrono::steady_clock::time_point deadline{};
};

struct NumResult {
  enum class Status { Sat, Unsat } status = Status::Unsat;
  std::vector<double> sigma;  // layout-ordered point reached
  double residual = 0.0;      // max(0, -min constraint value) at the final beta
  int iters = 0;
  std::uint64_t evals = 0;  // merit evaluations (value or gradient passes)
  std::string note;
};

// Penalty minimization of one fixed smoothed set from sigma0:
//   Phi(sigma) = w * sum_i max(0, -(c_i(sigma) + eps))^2
NumResult minimize_penalty(const SmoothSet& set, std::vector<double> sigma0,
                           const OptimizerConfig& cfg);

// Residual of a point on a set: max(0, -min_i c_i). Satisfied iff <= eps.
double constraint_residual(const SmoothSet& set, const double* sigma);

struct Phase1Result {
  NumResult res;
  VarLayout layout;
};

// Numerical phase: beta continuation over the smoothed abstractions of
// (p, I), warm-started from the previous point when given (matched by real
// slot and by relaxed Boolean slot), falling back to seeded random draws.
Phase1Result solve_phase1(const Program& p, const InterfaceMap& I, const OptimizerConfig& cfg,
                          const std::vector<double>* warm = nullptr,
                          const VarLayout* warm_layout = nullptr);

}  // namespace gradsat
