#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gradsat/bool_abs.hpp"

namespace gradsat::sat {

using Var = std::uint32_t;  // 0-based internal variable

struct Lit {
  std::uint32_t x = 0xffffffffu;  // 2*var + sign
  static Lit make(Var v, bool neg) { return Lit{2 * v + (neg ? 1u : 0u)}; }
  Var var() const { return x >> 1; }
  bool neg() const { return x & 1; }
  Lit operator~() const { return Lit{x ^ 1u}; }
  bool operator==(const Lit&) const = default;
};
inline constexpr Lit kUndefLit{0xffffffffu};

// Converts a DIMACS-signed literal (+v / -v, 1-based) to internal form.
inline Lit from_dimacs(int lit) {
  Var v = static_cast<Var>(lit < 0 ? -lit : lit) - 1;
  return Lit::make(v, lit < 0);
}
inline int to_dimacs(Lit l) {
  int v = static_cast<int>(l.var()) + 1;
  return l.neg() ? -v : v;
}

enum class LBool : std::uint8_t { False = 0, True = 1, Undef = 2 };

enum class SolveStatus : std::uint8_t { Sat, Unsat, SoftUnsat };

struct SolveResult {
  SolveStatus status = SolveStatus::Sat;
  // Interface variables newly assigned since the last report (1-based var,
  // value). Empty on Sat means the model is complete.
  std::vector<std::pair<PropVar, bool>> delta;
};

// CDCL solver with two extensions used by the synthesis loop:
//  - soft conflicts: externally supplied conflict clauses whose consequences
//    are tracked (taint) so an inconsistency caused only by them reports
//    SOFT_UNSAT instead of UNSAT and can be undone wholesale;
//  - suggestions: an ordered list of preferred decision literals consulted
//    before the activity heuristic.
// Decisions default to polarity false; there are no internal random restarts,
// so runs are deterministic.
class Solver {
 public:
  void init(const CnfProblem& cnf);
  void set_interface(const std::vector<PropVar>& vars);

  SolveResult solve_incremental();

  // Clause must be falsified by the current assignment; returns false (and
  // does nothing) otherwise. Lits are DIMACS-signed.
  bool add_soft_conflict(const std::vector<int>& lits);
  void remove_soft_learnts();

  void set_suggestions(const std::vector<int>& lits);
  void remove_suggestions();

  void restart();

  LBool value_dimacs(PropVar v) const { return assigns_[v - 1]; }
  bool complete() const { return trail_.size() == assigns_.size(); }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  std::vector<std::pair<PropVar, bool>> interface_snapshot() const;
  // Assigned interface literals as DIMACS ints in trail order, optionally
  // restricted to those assigned above the root level.
  std::vector<int> interface_lits(bool above_root_only) const;
  // Interface literals that are decision assignments (no reason clause,
  // level >= 1), in trail order. Propagation-forced literals are excluded.
  std::vector<int> decision_interface_lits() const;

  struct Stats {
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t soft_conflicts_added = 0;
    std::uint64_t learnt_hard = 0;
    std::uint64_t learnt_soft = 0;
    std::uint64_t reductions = 0;
    std::uint64_t restarts = 0;
  };
  const Stats& stats() const { return stats_; }
  std::size_t num_soft_clauses() const;

 private:
  using CRef = std::uint32_t;
  static constexpr CRef kNoRef = 0xffffffffu;

  enum class Kind : std::uint8_t { Original, Hard, Soft };

  struct Clause {
    Kind kind = Kind::Original;
    bool deleted = false;
    double activity = 0.0;
    std::vector<Lit> lits;
    bool soft() const { return kind == Kind::Soft; }
  };

  struct Watcher {
    CRef cr;
    Lit blocker;
  };

  LBool value(Lit l) const {
    LBool v = assigns_[l.var()];
    if (v == LBool::Undef) return v;
    return (v == LBool::True) != l.neg() ? LBool::True : LBool::False;
  }

  void ensure_vars(std::uint32_t n);
  CRef store_clause(std::vector<Lit> lits, Kind kind);
  void attach(CRef cr);
  void detach(CRef cr);
  void enqueue(Lit p, CRef from, bool extra_taint = false);
  CRef propagate();
  void analyze(CRef confl, std::vector<Lit>& out_learnt, int& out_btlevel, bool& out_taint);
  bool level0_taint(CRef confl) const;
  void cancel_until(int level);
  Lit pick_branch();
  void bump_var(Var v);
  void decay_var_activity();
  void bump_clause(Clause& c);
  void reduce_db();
  void handle_learnt(std::vector<Lit> learnt, bool taint);

  std::vector<Clause> clauses_;
  std::vector<std::vector<Watcher>> watches_;  // indexed by Lit.x
  std::vector<LBool> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<std::uint8_t> softdep_;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<std::uint8_t> iface_;
  std::size_t iface_cursor_ = 0;
  std::vector<Lit> suggestions_;
  std::vector<std::uint8_t> seen_;
  std::optional<SolveStatus> pending_;
  std::size_t hard_learnt_live_ = 0;
  std::size_t reduce_cap_ = 2000;
  Stats stats_;
};

}  // namespace gradsat::sat
