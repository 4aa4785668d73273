#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradsat/bool_abs.hpp"
#include "gradsat/interface_map.hpp"
#include "gradsat/ir.hpp"
#include "gradsat/optimizer.hpp"
#include "gradsat/sat.hpp"

namespace gradsat {

struct EngineConfig {
  OptimizerConfig opt;
  int eta = 5;            // suggest when strictly more than eta candidates remain
  int restart_limit = 3;  // full restarts after SOFT_UNSAT before giving up
  double timeout_sec = 0.0;  // 0 = unlimited
  bool baseline = false;     // smoothing-only: no SAT coupling
  int baseline_restarts = 20;
  bool interface_atoms_only = false;
  std::string trace_path;  // JSON-lines event log; empty = off
};

struct EngineStats {
  int numeric_calls = 0;
  int restarts = 0;
  std::uint64_t wall_ms = 0;
  int soft_conflicts = 0;
  int suggestion_rounds = 0;
  std::uint64_t merit_evals = 0;
  double final_residual = 0.0;
  sat::Solver::Stats sat;
};

struct EngineResult {
  enum class Status { Sat, Unsat, Unknown } status = Status::Unknown;
  Assignment assignment;  // meaningful when status == Sat
  bool verified = false;  // exact semantics re-checked the assignment
  EngineStats stats;
};

// Couples the numerical phase (smoothed feasibility search), suggestion /
// soft-conflict generation, and the incremental SAT phase into the full
// synthesis loop.
class Engine {
 public:
  Engine(const Program& p, EngineConfig cfg);
  EngineResult run();

 private:
  const Program& p_;
  EngineConfig cfg_;
};

}  // namespace gradsat
