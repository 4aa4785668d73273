#include "gradsat/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>

#include "json.hpp"

#include "gradsat/smooth.hpp"

namespace gradsat {

namespace {

using json = nlohmann::json;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct Trace {
  std::ofstream f;
  bool on = false;
  explicit Trace(const std::string& path) {
    if (!path.empty()) {
      f.open(path);
      on = f.is_open();
    }
  }
  void emit(json j) {
    if (!on) return;
    f << j.dump() << '\n';
    f.flush();
  }
};

struct Suggestion {
  int lit;      // DIMACS literal: preferred assignment
  double cost;  // distance from decided: smaller = closer to a decision
};

}  // namespace

Engine::Engine(const Program& p, EngineConfig cfg) : p_(p), cfg_(std::move(cfg)) {}

EngineResult Engine::run() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed_ms = [&] {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count());
  };
  auto timed_out = [&] {
    return cfg_.timeout_sec > 0.0 && elapsed_ms() >= cfg_.timeout_sec * 1000.0;
  };
  std::chrono::steady_clock::time_point deadline{};
  if (cfg_.timeout_sec > 0.0)
    deadline = t0 + std::chrono::duration_cast<clock::duration>(
                        std::chrono::duration<double>(cfg_.timeout_sec));

  Trace trace(cfg_.trace_path);
  EngineResult out;

  auto extract = [&](const Phase1Result& ph1, const InterfaceMap& I) {
    Assignment sigma;
    sigma.reals.assign(ph1.res.sigma.begin(),
                       ph1.res.sigma.begin() + ph1.layout.n_reals);
    sigma.bools.assign(p_.bools.size(), 0);
    for (std::uint32_t y = 0; y < p_.bools.size(); ++y) {
      TriBool v = I.hole(y);
      if (v != TriBool::Unset) {
        sigma.bools[y] = v == TriBool::True;
        continue;
      }
      int hv = ph1.layout.var_for_hole(y);
      if (hv >= 0) sigma.bools[y] = ph1.res.sigma[hv] >= 0.5;
    }
    return sigma;
  };

  auto verify_quiet = [&](const Assignment& sigma) {
    try {
      return p_.verify(sigma);
    } catch (const EvalError&) {
      return false;
    }
  };

  if (cfg_.baseline) {
    InterfaceMap empty = InterfaceMap::empty_for(p_);
    for (int k = 0; k < cfg_.baseline_restarts; ++k) {
      if (timed_out()) break;
      OptimizerConfig oc = cfg_.opt;
      oc.seed = mix64(cfg_.opt.seed ^ mix64(static_cast<std::uint64_t>(k) + 1));
      oc.num_restarts = 1;
      oc.deadline = deadline;
      Phase1Result ph1 = solve_phase1(p_, empty, oc);
      ++out.stats.numeric_calls;
      out.stats.merit_evals += ph1.res.evals;
      out.stats.final_residual = ph1.res.residual;
      trace.emit({{"ev", "numeric"},
                  {"call", out.stats.numeric_calls},
                  {"sat", ph1.res.status == NumResult::Status::Sat},
                  {"residual", ph1.res.residual}});
      if (ph1.res.status != NumResult::Status::Sat) continue;
      Assignment sigma = extract(ph1, empty);
      if (verify_quiet(sigma)) {
        out.status = EngineResult::Status::Sat;
        out.assignment = std::move(sigma);
        out.verified = true;
        break;
      }
      trace.emit({{"ev", "verify_failed"}, {"call", out.stats.numeric_calls}});
    }
    out.stats.wall_ms = elapsed_ms();
    return out;
  }

  CnfProblem cnf = abstract_bool(p_, cfg_.interface_atoms_only);
  sat::Solver solver;
  solver.init(cnf);
  solver.set_interface(cnf.interface_vars);
  std::vector<BoolItem> var_item(cnf.num_vars + 1);
  std::vector<std::uint8_t> var_is_iface(cnf.num_vars + 1, 0);
  for (std::size_t i = 0; i < cnf.interface_vars.size(); ++i) {
    var_item[cnf.interface_vars[i]] = cnf.interface_items[i];
    var_is_iface[cnf.interface_vars[i]] = 1;
  }

  InterfaceMap I = InterfaceMap::empty_for(p_);
  std::optional<std::vector<double>> warm;
  VarLayout warm_layout;
  int restarts = 0;
  bool tighten_tried = false;
  const double base_eps = cfg_.opt.eps;
  double cur_eps = base_eps;

  auto finish = [&](EngineResult::Status st) {
    out.status = st;
    out.stats.restarts = restarts;
    out.stats.sat = solver.stats();
    out.stats.wall_ms = elapsed_ms();
    return out;
  };

  auto do_restart = [&] {
    solver.remove_soft_learnts();
    solver.remove_suggestions();
    solver.restart();
    ++restarts;
    I.clear();
    warm.reset();
    tighten_tried = false;
    cur_eps = base_eps;
    trace.emit({{"ev", "restart"}, {"round", restarts}});
  };

  auto gen_suggestions = [&](const Phase1Result& ph1) {
    std::vector<Suggestion> s;
    SmoothParams prm;
    prm.beta = cfg_.opt.hard_beta;
    prm.eps = cur_eps;
    SmoothSet set = abstract_num(p_, I, prm);
    if (set.layout.total() != ph1.layout.total()) return s;
    std::vector<double> values;
    eval_smooth(set, ph1.res.sigma.data(), values);
    for (std::size_t i = 0; i < cnf.interface_items.size(); ++i) {
      const BoolItem& it = cnf.interface_items[i];
      int var = static_cast<int>(cnf.interface_vars[i]);
      double d;
      int lit;
      double cost;
      if (it.is_hole) {
        if (I.hole(it.hole) != TriBool::Unset) continue;
        int hv = set.layout.var_for_hole(it.hole);
        if (hv < 0) continue;
        d = ph1.res.sigma[hv];
        lit = d >= 0.5 ? var : -var;
        cost = std::fabs(d - 0.5);
      } else {
        if (I.node(it.node) != TriBool::Unset) continue;
        SNodeId sn = set.bool_smooth[it.node];
        if (sn == kInvalidSNode) continue;
        d = values[sn];
        lit = d >= 0.0 ? var : -var;
        cost = std::fabs(d);
      }
      if (!std::isfinite(cost)) continue;
      s.push_back(Suggestion{lit, cost});
    }
    std::stable_sort(s.begin(), s.end(),
                     [](const Suggestion& a, const Suggestion& b) { return a.cost < b.cost; });
    return s;
  };

  auto snapshot_interface = [&] {
    InterfaceMap In = InterfaceMap::empty_for(p_);
    for (auto [v, val] : solver.interface_snapshot()) {
      if (!var_is_iface[v]) continue;
      const BoolItem& it = var_item[v];
      if (it.is_hole)
        In.set_hole(it.hole, val);
      else
        In.set_node(it.node, val);
    }
    return In;
  };

  // Negation of the assigned interface literals, preferring the ones picked
  // by decisions: those clauses prune exactly the choices the search made.
  // When every assigned literal was forced, fall back to the full set.
  auto conflict_clause = [&] {
    std::vector<int> assigned = solver.decision_interface_lits();
    if (assigned.empty()) assigned = solver.interface_lits(false);
    std::vector<int> omega;
    omega.reserve(assigned.size());
    for (int l : assigned) omega.push_back(-l);
    return omega;
  };

  auto push_suggestions = [&](const Phase1Result& ph1) {
    auto sugg = gen_suggestions(ph1);
    std::vector<int> lits;
    lits.reserve(sugg.size());
    for (const auto& s : sugg) lits.push_back(s.lit);
    solver.set_suggestions(lits);
    ++out.stats.suggestion_rounds;
    trace.emit({{"ev", "suggestions"}, {"count", lits.size()}});
  };

  while (true) {
    if (timed_out()) return finish(EngineResult::Status::Unknown);

    // Numerical phase: minimize the smoothed penalty under the current pins.
    OptimizerConfig oc = cfg_.opt;
    oc.eps = cur_eps;
    oc.deadline = deadline;
    oc.seed = mix64(cfg_.opt.seed ^ mix64(static_cast<std::uint64_t>(out.stats.numeric_calls)) ^
                    mix64(static_cast<std::uint64_t>(restarts) * 0x9e37ull));
    Phase1Result ph1 = solve_phase1(p_, I, oc, warm ? &*warm : nullptr,
                                    warm ? &warm_layout : nullptr);
    ++out.stats.numeric_calls;
    out.stats.merit_evals += ph1.res.evals;
    out.stats.final_residual = ph1.res.residual;
    warm = ph1.res.sigma;
    warm_layout = ph1.layout;
    const bool numeric_ok = ph1.res.status == NumResult::Status::Sat;
    trace.emit({{"ev", "numeric"},
                {"call", out.stats.numeric_calls},
                {"sat", numeric_ok},
                {"residual", ph1.res.residual},
                {"pinned", I.num_set()}});

    if (numeric_ok) {
      // A verified rounding of the numerical point already answers the query;
      // the Boolean search only needs to continue when rounding breaks
      // something.
      Assignment sigma = extract(ph1, I);
      if (verify_quiet(sigma)) {
        out.assignment = std::move(sigma);
        out.verified = true;
        return finish(EngineResult::Status::Sat);
      }
      trace.emit({{"ev", "verify_failed"}, {"call", out.stats.numeric_calls}});
      if (!tighten_tried) {
        // One retry with a tighter slack: boundary-hugging points often round
        // to an exactly-violating assignment.
        tighten_tried = true;
        cur_eps = base_eps / 10.0;
        continue;
      }
    }

    // Steering phase: a satisfiable relaxation biases upcoming decisions
    // toward the numerical point; a failed one retracts that advice and, once
    // more than eta interface entries are pinned, blocks the current branch
    // with a soft conflict.
    if (numeric_ok) {
      push_suggestions(ph1);
    } else {
      solver.remove_suggestions();
      if (I.num_set() > static_cast<std::size_t>(cfg_.eta)) {
        std::vector<int> omega = conflict_clause();
        bool added = !omega.empty() && solver.add_soft_conflict(omega);
        if (added) ++out.stats.soft_conflicts;
        trace.emit({{"ev", "soft_conflict"}, {"size", omega.size()}, {"accepted", added}});
      }
    }

    // Boolean phase: advance the search until it pins something new or
    // reaches a full model.
    sat::SolveResult sres = solver.solve_incremental();
    trace.emit({{"ev", "sat_step"},
                {"status", sres.status == sat::SolveStatus::Sat
                               ? "sat"
                               : (sres.status == sat::SolveStatus::Unsat ? "unsat" : "soft_unsat")},
                {"delta", sres.delta.size()},
                {"complete", solver.complete()}});
    if (sres.status == sat::SolveStatus::Unsat) return finish(EngineResult::Status::Unsat);
    if (sres.status == sat::SolveStatus::SoftUnsat) {
      if (restarts >= cfg_.restart_limit) return finish(EngineResult::Status::Unknown);
      do_restart();
      continue;
    }

    InterfaceMap In = snapshot_interface();
    if (!(In == I)) {
      // New pins for the next numerical round.
      I = std::move(In);
      tighten_tried = false;
      cur_eps = base_eps;
      continue;
    }

    // The search has nothing new to pin: the numerical point plus the Boolean
    // model is the final candidate for this branch.
    Assignment sigma = extract(ph1, I);
    if (verify_quiet(sigma)) {
      out.assignment = std::move(sigma);
      out.verified = true;
      return finish(EngineResult::Status::Sat);
    }
    trace.emit({{"ev", "verify_failed"}, {"call", out.stats.numeric_calls}});
    if (!tighten_tried) {
      tighten_tried = true;
      cur_eps = base_eps / 10.0;
      continue;
    }
    // Exhausted branch: force the search elsewhere so every iteration either
    // pins, prunes, or restarts; without this a stalled model would repeat
    // forever.
    std::vector<int> omega = conflict_clause();
    bool added = !omega.empty() && solver.add_soft_conflict(omega);
    trace.emit({{"ev", "soft_conflict"}, {"size", omega.size()}, {"accepted", added}});
    if (!added) {
      if (restarts >= cfg_.restart_limit) return finish(EngineResult::Status::Unknown);
      do_restart();
      continue;
    }
    ++out.stats.soft_conflicts;
    I = snapshot_interface();
    tighten_tried = false;
    cur_eps = base_eps;
  }
}

}  // namespace gradsat
