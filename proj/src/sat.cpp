#include "gradsat/sat.hpp"

#include <algorithm>
#include <cmath>

namespace gradsat::sat {

void Solver::ensure_vars(std::uint32_t n) {
  assigns_.assign(n, LBool::Undef);
  level_.assign(n, 0);
  reason_.assign(n, kNoRef);
  softdep_.assign(n, 0);
  activity_.assign(n, 0.0);
  seen_.assign(n, 0);
  iface_.assign(n, 0);
  watches_.assign(2 * std::size_t(n), {});
}

Solver::CRef Solver::store_clause(std::vector<Lit> lits, Kind kind) {
  CRef cr = static_cast<CRef>(clauses_.size());
  Clause c;
  c.kind = kind;
  c.lits = std::move(lits);
  clauses_.push_back(std::move(c));
  if (kind == Kind::Hard && clauses_.back().lits.size() >= 2) ++hard_learnt_live_;
  return cr;
}

void Solver::attach(CRef cr) {
  const Clause& c = clauses_[cr];
  watches_[(~c.lits[0]).x].push_back({cr, c.lits[1]});
  watches_[(~c.lits[1]).x].push_back({cr, c.lits[0]});
}

void Solver::detach(CRef cr) {
  const Clause& c = clauses_[cr];
  for (int i = 0; i < 2; ++i) {
    auto& ws = watches_[(~c.lits[i]).x];
    for (std::size_t k = 0; k < ws.size(); ++k) {
      if (ws[k].cr == cr) {
        ws[k] = ws.back();
        ws.pop_back();
        break;
      }
    }
  }
}

void Solver::enqueue(Lit p, CRef from, bool extra_taint) {
  Var v = p.var();
  assigns_[v] = p.neg() ? LBool::False : LBool::True;
  level_[v] = decision_level();
  reason_[v] = from;
  bool taint = extra_taint;
  if (from != kNoRef) {
    const Clause& c = clauses_[from];
    if (c.soft()) taint = true;
    if (!taint) {
      for (Lit q : c.lits) {
        if (q.var() != v && softdep_[q.var()]) {
          taint = true;
          break;
        }
      }
    }
  }
  softdep_[v] = taint ? 1 : 0;
  trail_.push_back(p);
  ++stats_.propagations;
}

Solver::CRef Solver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    // Clauses register under the negation of each watched literal, so the
    // list keyed by the newly true literal holds exactly the clauses whose
    // watch just became false.
    auto& ws = watches_[p.x];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      Watcher w = ws[i];
      if (value(w.blocker) == LBool::True) {
        ws[j++] = ws[i++];
        continue;
      }
      Clause& c = clauses_[w.cr];
      Lit false_lit = ~p;
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      ++i;
      Lit first = c.lits[0];
      if (first != w.blocker && value(first) == LBool::True) {
        ws[j++] = {w.cr, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != LBool::False) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[(~c.lits[1]).x].push_back({w.cr, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cr, first};
      if (value(first) == LBool::False) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return w.cr;
      }
      enqueue(first, w.cr);
    }
    ws.resize(j);
  }
  return kNoRef;
}

void Solver::bump_var(Var v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
}

void Solver::decay_var_activity() { var_inc_ /= 0.95; }

void Solver::bump_clause(Clause& c) {
  c.activity += cla_inc_;
  if (c.activity > 1e20) {
    for (auto& cl : clauses_) cl.activity *= 1e-20;
    cla_inc_ *= 1e-20;
  }
}

void Solver::analyze(CRef confl, std::vector<Lit>& out_learnt, int& out_btlevel,
                     bool& out_taint) {
  out_learnt.clear();
  out_learnt.push_back(kUndefLit);  // slot for the asserting literal
  out_taint = false;
  int pathc = 0;
  Lit p = kUndefLit;
  std::size_t index = trail_.size();
  std::vector<Var> to_clear;
  CRef cur = confl;
  const int cur_level = decision_level();
  while (true) {
    Clause& c = clauses_[cur];
    if (c.soft()) out_taint = true;
    if (c.kind != Kind::Original) bump_clause(c);
    for (Lit q : c.lits) {
      if (p != kUndefLit && q == p) continue;
      Var v = q.var();
      if (seen_[v]) continue;
      if (level_[v] == 0) {
        // literal discharged by a root-level fact: its derivation taints ours
        if (softdep_[v]) out_taint = true;
        continue;
      }
      seen_[v] = 1;
      to_clear.push_back(v);
      bump_var(v);
      if (level_[v] == cur_level)
        ++pathc;
      else
        out_learnt.push_back(q);
    }
    while (!seen_[trail_[index - 1].var()]) --index;
    p = trail_[--index];
    Var pv = p.var();
    seen_[pv] = 0;
    --pathc;
    if (pathc <= 0) break;
    cur = reason_[pv];
  }
  out_learnt[0] = ~p;
  out_btlevel = 0;
  if (out_learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < out_learnt.size(); ++k)
      if (level_[out_learnt[k].var()] > level_[out_learnt[max_i].var()]) max_i = k;
    std::swap(out_learnt[1], out_learnt[max_i]);
    out_btlevel = level_[out_learnt[1].var()];
  }
  for (Var v : to_clear) seen_[v] = 0;
  cla_inc_ /= 0.999;
}

bool Solver::level0_taint(CRef confl) const {
  const Clause& c = clauses_[confl];
  if (c.soft()) return true;
  for (Lit q : c.lits)
    if (softdep_[q.var()]) return true;
  return false;
}

void Solver::cancel_until(int lvl) {
  if (decision_level() <= lvl) return;
  std::size_t lim = trail_lim_[lvl];
  for (std::size_t t = trail_.size(); t > lim; --t) {
    Var v = trail_[t - 1].var();
    assigns_[v] = LBool::Undef;
    reason_[v] = kNoRef;
    softdep_[v] = 0;
  }
  trail_.resize(lim);
  trail_lim_.resize(lvl);
  qhead_ = lim;
  if (iface_cursor_ > lim) iface_cursor_ = lim;
}

Lit Solver::pick_branch() {
  for (Lit s : suggestions_)
    if (assigns_[s.var()] == LBool::Undef) return s;
  Var best = 0;
  double best_act = -1.0;
  for (Var v = 0; v < assigns_.size(); ++v) {
    if (assigns_[v] == LBool::Undef && activity_[v] > best_act) {
      best_act = activity_[v];
      best = v;
    }
  }
  return Lit::make(best, true);  // default polarity: false
}

void Solver::handle_learnt(std::vector<Lit> learnt, bool taint) {
  Kind kind = taint ? Kind::Soft : Kind::Hard;
  if (kind == Kind::Soft)
    ++stats_.learnt_soft;
  else
    ++stats_.learnt_hard;
  if (learnt.size() == 1) {
    Lit u = learnt[0];
    store_clause(std::move(learnt), kind);  // kept (unattached) for DB rebuilds
    enqueue(u, kNoRef, taint);
    return;
  }
  CRef cr = store_clause(std::move(learnt), kind);
  attach(cr);
  enqueue(clauses_[cr].lits[0], cr);
}

void Solver::reduce_db() {
  std::vector<CRef> cand;
  for (CRef cr = 0; cr < clauses_.size(); ++cr) {
    const Clause& c = clauses_[cr];
    if (c.deleted || c.kind != Kind::Hard || c.lits.size() < 2) continue;
    Var v = c.lits[0].var();
    bool locked = assigns_[v] != LBool::Undef && reason_[v] == cr && value(c.lits[0]) == LBool::True;
    if (!locked) cand.push_back(cr);
  }
  std::sort(cand.begin(), cand.end(), [&](CRef a, CRef b) {
    if (clauses_[a].activity != clauses_[b].activity)
      return clauses_[a].activity < clauses_[b].activity;
    return a < b;
  });
  for (std::size_t k = 0; k < cand.size() / 2; ++k) {
    detach(cand[k]);
    clauses_[cand[k]].deleted = true;
    --hard_learnt_live_;
  }
  reduce_cap_ = reduce_cap_ + reduce_cap_ / 2;
  ++stats_.reductions;
}

void Solver::init(const CnfProblem& cnf) {
  clauses_.clear();
  trail_.clear();
  trail_lim_.clear();
  suggestions_.clear();
  qhead_ = 0;
  iface_cursor_ = 0;
  pending_.reset();
  hard_learnt_live_ = 0;
  reduce_cap_ = 2000;
  var_inc_ = 1.0;
  cla_inc_ = 1.0;
  stats_ = Stats{};
  ensure_vars(cnf.num_vars);
  for (const auto& cl : cnf.clauses) {
    std::vector<Lit> lits;
    lits.reserve(cl.size());
    for (int d : cl) lits.push_back(from_dimacs(d));
    std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.x < b.x; });
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    bool taut = false;
    for (std::size_t k = 1; k < lits.size(); ++k)
      if (lits[k].x == (lits[k - 1].x ^ 1u)) {
        taut = true;
        break;
      }
    if (taut) continue;
    if (lits.empty()) {
      pending_ = SolveStatus::Unsat;
      return;
    }
    if (lits.size() == 1) {
      Lit u = lits[0];
      store_clause(std::move(lits), Kind::Original);
      if (value(u) == LBool::False) {
        pending_ = SolveStatus::Unsat;
        return;
      }
      if (value(u) == LBool::Undef) enqueue(u, kNoRef);
      continue;
    }
    CRef cr = store_clause(std::move(lits), Kind::Original);
    attach(cr);
  }
}

void Solver::set_interface(const std::vector<PropVar>& vars) {
  std::fill(iface_.begin(), iface_.end(), 0);
  for (PropVar v : vars) iface_[v - 1] = 1;
}

SolveResult Solver::solve_incremental() {
  SolveResult r;
  if (pending_) {
    r.status = *pending_;
    return r;
  }
  while (true) {
    CRef confl = propagate();
    if (confl != kNoRef) {
      ++stats_.conflicts;
      if (decision_level() == 0) {
        pending_ = level0_taint(confl) ? SolveStatus::SoftUnsat : SolveStatus::Unsat;
        r.status = *pending_;
        return r;
      }
      std::vector<Lit> learnt;
      int bt;
      bool taint;
      analyze(confl, learnt, bt, taint);
      cancel_until(bt);
      handle_learnt(std::move(learnt), taint);
      decay_var_activity();
      if (hard_learnt_live_ > reduce_cap_) reduce_db();
      continue;
    }
    for (std::size_t t = iface_cursor_; t < trail_.size(); ++t) {
      Lit l = trail_[t];
      if (iface_[l.var()]) r.delta.push_back({l.var() + 1, !l.neg()});
    }
    iface_cursor_ = trail_.size();
    if (!r.delta.empty()) return r;
    if (complete()) return r;
    Lit d = pick_branch();
    trail_lim_.push_back(trail_.size());
    enqueue(d, kNoRef);
    ++stats_.decisions;
  }
}

bool Solver::add_soft_conflict(const std::vector<int>& dlits) {
  if (pending_) return false;
  std::vector<Lit> lits;
  lits.reserve(dlits.size());
  for (int d : dlits) lits.push_back(from_dimacs(d));
  std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.x < b.x; });
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (Lit l : lits)
    if (value(l) != LBool::False) return false;
  ++stats_.soft_conflicts_added;
  int maxlev = 0;
  for (Lit l : lits) maxlev = std::max(maxlev, level_[l.var()]);
  cancel_until(maxlev);
  if (maxlev == 0) {
    pending_ = SolveStatus::SoftUnsat;
    return true;
  }
  if (lits.size() == 1) {
    // Unit soft conflict: the literal must hold from now on.
    Lit u = lits[0];
    cancel_until(0);
    store_clause({u}, Kind::Soft);
    ++stats_.learnt_soft;
    if (value(u) == LBool::False)
      pending_ = SolveStatus::SoftUnsat;
    else if (value(u) == LBool::Undef)
      enqueue(u, kNoRef, true);
    return true;
  }
  std::sort(lits.begin(), lits.end(),
            [&](Lit a, Lit b) { return level_[a.var()] > level_[b.var()]; });
  CRef cr = store_clause(std::move(lits), Kind::Soft);
  attach(cr);
  ++stats_.conflicts;
  std::vector<Lit> learnt;
  int bt;
  bool taint;
  analyze(cr, learnt, bt, taint);
  cancel_until(bt);
  handle_learnt(std::move(learnt), taint);
  decay_var_activity();
  // The conflict clause itself may have become unit at the backjump level.
  Clause& c = clauses_[cr];
  if (value(c.lits[0]) == LBool::Undef) {
    bool rest_false = true;
    for (std::size_t k = 1; k < c.lits.size(); ++k)
      if (value(c.lits[k]) != LBool::False) {
        rest_false = false;
        break;
      }
    if (rest_false) enqueue(c.lits[0], cr);
  }
  return true;
}

void Solver::remove_soft_learnts() {
  cancel_until(0);
  for (Lit l : trail_) {
    Var v = l.var();
    assigns_[v] = LBool::Undef;
    reason_[v] = kNoRef;
    softdep_[v] = 0;
  }
  trail_.clear();
  trail_lim_.clear();
  qhead_ = 0;
  iface_cursor_ = 0;
  for (CRef cr = 0; cr < clauses_.size(); ++cr) {
    Clause& c = clauses_[cr];
    if (c.deleted || !c.soft()) continue;
    if (c.lits.size() >= 2) detach(cr);
    c.deleted = true;
  }
  if (pending_ == SolveStatus::SoftUnsat) pending_.reset();
  if (pending_) return;
  // Rebuild the root level from the remaining (hard) units and propagate.
  for (const Clause& c : clauses_) {
    if (c.deleted || c.lits.size() != 1) continue;
    Lit u = c.lits[0];
    if (value(u) == LBool::False) {
      pending_ = SolveStatus::Unsat;
      return;
    }
    if (value(u) == LBool::Undef) enqueue(u, kNoRef, c.soft());
  }
  if (propagate() != kNoRef) pending_ = SolveStatus::Unsat;
}

void Solver::set_suggestions(const std::vector<int>& lits) {
  suggestions_.clear();
  for (int d : lits) suggestions_.push_back(from_dimacs(d));
}

void Solver::remove_suggestions() { suggestions_.clear(); }

void Solver::restart() {
  cancel_until(0);
  iface_cursor_ = 0;
  ++stats_.restarts;
}

std::vector<std::pair<PropVar, bool>> Solver::interface_snapshot() const {
  std::vector<std::pair<PropVar, bool>> out;
  for (Var v = 0; v < assigns_.size(); ++v)
    if (iface_[v] && assigns_[v] != LBool::Undef)
      out.push_back({v + 1, assigns_[v] == LBool::True});
  return out;
}

std::vector<int> Solver::interface_lits(bool above_root_only) const {
  std::vector<int> out;
  for (Lit l : trail_) {
    Var v = l.var();
    if (!iface_[v]) continue;
    if (above_root_only && level_[v] == 0) continue;
    out.push_back(to_dimacs(l));
  }
  return out;
}

std::vector<int> Solver::decision_interface_lits() const {
  std::vector<int> out;
  for (Lit l : trail_) {
    Var v = l.var();
    if (!iface_[v]) continue;
    if (level_[v] == 0 || reason_[v] != kNoRef) continue;
    out.push_back(to_dimacs(l));
  }
  return out;
}

std::size_t Solver::num_soft_clauses() const {
  std::size_t n = 0;
  for (const auto& c : clauses_)
    if (!c.deleted && c.soft()) ++n;
  return n;
}

}  // namespace gradsat::sat
