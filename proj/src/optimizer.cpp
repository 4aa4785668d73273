#include "gradsat/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gradsat {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  double u = (rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

bool past_deadline(const OptimizerConfig& cfg) {
  return cfg.deadline.time_since_epoch().count() != 0 &&
         std::chrono::steady_clock::now() >= cfg.deadline;
}

// Descent drives requirement constraints to an interior margin of +eps so the
// point that finally clears the slack test (>= -eps) usually also clears the
// exact, slack-free semantics. Auxiliary relaxation constraints (the [0,1]
// box and the tightness wedge on blended Boolean unknowns) keep the plain
// -eps target; pressing them past their boundary has no exactness payoff.
double merit_target(const SmoothSet& set, const SmoothConstraint& c) {
  switch (c.prov.kind) {
    case ConstraintProv::Assert:
    case ConstraintProv::PinTrue:
    case ConstraintProv::PinFalse:
      return set.params.eps;
    default:
      return -set.params.eps;
  }
}

// Merit value at a point; +inf if any node value is non-finite.
double merit_value(const SmoothSet& set, const double* sigma, std::vector<double>& values,
                   const OptimizerConfig& cfg) {
  eval_smooth(set, sigma, values);
  double f = 0.0;
  for (const auto& c : set.constraints) {
    double v = values[c.expr];
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    double h = merit_target(set, c) - v;
    if (h > 0.0) f += h * h;
  }
  return cfg.penalty_weight * f;
}

// Merit value and gradient; false if the point is invalid (non-finite).
bool merit_grad(const SmoothSet& set, const double* sigma, GradWorkspace& ws, double& f,
                std::vector<double>& g, const OptimizerConfig& cfg) {
  SNodeId bad = eval_with_grad(set, sigma, ws);
  if (bad != kInvalidSNode) return false;
  const std::uint32_t nv = set.layout.total();
  f = 0.0;
  g.assign(nv, 0.0);
  for (const auto& c : set.constraints) {
    double v = ws.values[c.expr];
    double h = merit_target(set, c) - v;
    if (h <= 0.0) continue;
    f += h * h;
    const double* gr = ws.grad_row(c.expr);
    double scale = -2.0 * cfg.penalty_weight * h;
    for (std::uint32_t k = 0; k < nv; ++k) g[k] += scale * gr[k];
  }
  f *= cfg.penalty_weight;
  if (!std::isfinite(f)) return false;
  for (std::uint32_t k = 0; k < nv; ++k)
    if (!std::isfinite(g[k])) return false;
  return true;
}

struct LbfgsMemory {
  std::vector<std::vector<double>> s, y;
  std::vector<double> rho;
  int cap;
  explicit LbfgsMemory(int m) : cap(m) {}

  void clear() {
    s.clear();
    y.clear();
    rho.clear();
  }

  void push(std::vector<double> si, std::vector<double> yi) {
    double sy = 0.0, yy = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < si.size(); ++i) {
      sy += si[i] * yi[i];
      yy += yi[i] * yi[i];
      ss += si[i] * si[i];
    }
    if (!(sy > 1e-12 * std::sqrt(ss * yy)) || !std::isfinite(sy)) return;  // curvature guard
    s.push_back(std::move(si));
    y.push_back(std::move(yi));
    rho.push_back(1.0 / sy);
    if (static_cast<int>(s.size()) > cap) {
      s.erase(s.begin());
      y.erase(y.begin());
      rho.erase(rho.begin());
    }
  }

  // Two-loop recursion: d = -H g.
  void direction(const std::vector<double>& g, std::vector<double>& d) const {
    d = g;
    const int m = static_cast<int>(s.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      double a = 0.0;
      for (std::size_t k = 0; k < d.size(); ++k) a += s[i][k] * d[k];
      a *= rho[i];
      alpha[i] = a;
      for (std::size_t k = 0; k < d.size(); ++k) d[k] -= a * y[i][k];
    }
    if (m > 0) {
      double sy = 1.0 / rho[m - 1], yy = 0.0;
      for (double v : y[m - 1]) yy += v * v;
      double gamma = yy > 0.0 ? sy / yy : 1.0;
      for (double& v : d) v *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      double b = 0.0;
      for (std::size_t k = 0; k < d.size(); ++k) b += y[i][k] * d[k];
      b *= rho[i];
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += (alpha[i] - b) * s[i][k];
    }
    for (double& v : d) v = -v;
  }
};

}  // namespace

double constraint_residual(const SmoothSet& set, const double* sigma) {
  std::vector<double> values;
  eval_smooth(set, sigma, values);
  double worst = 0.0;
  for (const auto& c : set.constraints) {
    double v = values[c.expr];
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, -v);
  }
  return worst;
}

NumResult minimize_penalty(const SmoothSet& set, std::vector<double> sigma0,
                           const OptimizerConfig& cfg) {
  NumResult out;
  const std::uint32_t nv = set.layout.total();
  std::vector<double> x = std::move(sigma0);
  x.resize(nv, 0.0);

  GradWorkspace ws;
  std::vector<double> values, g, gnew, d, xtrial;
  LbfgsMemory mem(cfg.lbfgs_memory);

  double f;
  if (!merit_grad(set, x.data(), ws, f, g, cfg)) {
    out.sigma = std::move(x);
    out.residual = std::numeric_limits<double>::infinity();
    out.note = "non-finite at initial point";
    out.evals = 1;
    return out;
  }
  ++out.evals;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    out.iters = iter;
    if (f == 0.0) break;  // merit zero: every constraint within slack
    if (past_deadline(cfg)) {
      out.note = "deadline";
      break;
    }
    double gnorm = 0.0;
    for (double v : g) gnorm = std::max(gnorm, std::fabs(v));
    if (gnorm < cfg.grad_tol) {
      out.note = "stationary point";
      break;
    }

    if (cfg.quasi_newton)
      mem.direction(g, d);
    else {
      d.assign(g.begin(), g.end());
      for (double& v : d) v = -v;
    }
    double slope = 0.0;
    for (std::uint32_t k = 0; k < nv; ++k) slope += g[k] * d[k];
    if (!(slope < 0.0)) {  // not a descent direction: fall back to steepest
      mem.clear();
      d.assign(g.begin(), g.end());
      for (double& v : d) v = -v;
      slope = 0.0;
      for (std::uint32_t k = 0; k < nv; ++k) slope += g[k] * d[k];
    }

    // Unit steps are right for a well-scaled quasi-Newton direction, but an
    // exploding-dynamics region can produce directions of astronomical size
    // that forty halvings cannot tame; cap the first trial at one unit per
    // coordinate.
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::fabs(v));
    double alpha = dmax > 1.0 ? 1.0 / dmax : 1.0;
    bool accepted = false;
    xtrial.resize(nv);
    double ftrial = 0.0;
    for (int ls = 0; ls < cfg.max_linesearch; ++ls) {
      for (std::uint32_t k = 0; k < nv; ++k) xtrial[k] = x[k] + alpha * d[k];
      ftrial = merit_value(set, xtrial.data(), values, cfg);
      ++out.evals;
      if (ftrial <= f + cfg.armijo_c * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (cfg.quasi_newton && !mem.s.empty()) {
        mem.clear();  // retry from steepest descent next iteration
        continue;
      }
      out.note = "line search failed";
      break;
    }

    if (!merit_grad(set, xtrial.data(), ws, ftrial, gnew, cfg)) {
      out.note = "non-finite gradient";
      break;
    }
    ++out.evals;
    if (cfg.quasi_newton) {
      std::vector<double> step(nv), ydiff(nv);
      for (std::uint32_t k = 0; k < nv; ++k) {
        step[k] = xtrial[k] - x[k];
        ydiff[k] = gnew[k] - g[k];
      }
      mem.push(std::move(step), std::move(ydiff));
    }
    x = xtrial;
    f = ftrial;
    g = gnew;
  }

  out.residual = constraint_residual(set, x.data());
  ++out.evals;
  out.sigma = std::move(x);
  out.status = out.residual <= set.params.eps ? NumResult::Status::Sat : NumResult::Status::Unsat;
  return out;
}

Phase1Result solve_phase1(const Program& p, const InterfaceMap& I, const OptimizerConfig& cfg,
                          const std::vector<double>* warm, const VarLayout* warm_layout) {
  std::vector<SmoothSet> sets;
  for (double beta : cfg.beta_schedule) {
    if (past_deadline(cfg)) break;  // those stages would be cut anyway
    SmoothParams prm;
    prm.beta = beta;
    prm.eps = cfg.eps;
    sets.push_back(abstract_num(p, I, prm));
  }
  {
    // The hard-sharpness set always exists: it is the feasibility gate and
    // the source of the variable layout.
    SmoothParams prm;
    prm.beta = cfg.hard_beta;
    prm.eps = cfg.eps;
    sets.push_back(abstract_num(p, I, prm));
  }
  const VarLayout& layout = sets.back().layout;
  const std::uint32_t nv = layout.total();

  std::mt19937_64 rng(cfg.seed);
  auto draw_raw = [&](std::vector<double>& x) {
    x.resize(nv);
    for (std::uint32_t k = 0; k < layout.n_reals; ++k) {
      const RealDecl& r = p.reals[k];
      if (r.bounded)
        x[k] = uniform(rng, r.lo, r.hi);
      else
        x[k] = uniform(rng, cfg.init_lo, cfg.init_hi);
    }
    for (std::size_t i = 0; i < layout.relaxed_holes.size(); ++i)
      x[layout.n_reals + i] = uniform(rng, 0.0, 1.0);
  };

  // Pinned atoms contribute raw (sharpness-independent) inequalities, and the
  // assert terms are rewritten under the pinned truth values, so the landscape
  // outside the pinned region is dominated by walls from branches the pins
  // have excluded. Starting inside the pinned region is the whole point of
  // pinning; rejection-sample a few draws and fall back to the least
  // pin-violating one.
  bool have_pins = false;
  for (const auto& c : sets.back().constraints)
    if (c.prov.kind == ConstraintProv::PinTrue || c.prov.kind == ConstraintProv::PinFalse)
      have_pins = true;
  std::vector<double> draw_values, draw_best;
  std::uint64_t draw_evals = 0;
  auto draw = [&](std::vector<double>& x) {
    draw_raw(x);
    if (!have_pins) return;
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 16; ++t) {
      if (t > 0) draw_raw(x);
      ++draw_evals;
      eval_smooth(sets.back(), x.data(), draw_values);
      double viol = 0.0;
      for (const auto& c : sets.back().constraints) {
        if (c.prov.kind != ConstraintProv::PinTrue && c.prov.kind != ConstraintProv::PinFalse)
          continue;
        double v = draw_values[c.expr];
        if (!std::isfinite(v)) {
          viol = std::numeric_limits<double>::infinity();
          break;
        }
        viol += std::max(0.0, -v);
      }
      if (viol == 0.0) return;
      if (viol < best) {
        best = viol;
        draw_best = x;
      }
    }
    if (!draw_best.empty()) x = draw_best;
  };

  // Deeply unrolled dynamics can explode at an aggressive start point: the
  // penalty stays bounded (sigmoids saturate) while its gradient grows like
  // the per-step amplification raised to the horizon length, and no step size
  // makes progress against that noise. Halve the distance to the
  // initialization-box center until both the residual and the gradient are
  // moderate; the center itself is the tamest point available.
  GradWorkspace pull_ws;
  std::vector<double> pull_g;
  std::uint64_t pull_evals = 0;
  auto pull_tame = [&](std::vector<double>& x) {
    for (int k = 0; k < 64; ++k) {
      ++pull_evals;
      // NaN and infinity fail these tests as well.
      if (constraint_residual(sets.front(), x.data()) <= 1e3) {
        double f;
        ++pull_evals;
        if (merit_grad(sets.front(), x.data(), pull_ws, f, pull_g, cfg)) {
          double gmax = 0.0;
          for (double v : pull_g) gmax = std::max(gmax, std::fabs(v));
          if (gmax <= 1e9) return;
        }
      }
      for (std::uint32_t j = 0; j < layout.n_reals; ++j) {
        const RealDecl& rd = p.reals[j];
        double c = rd.bounded ? 0.5 * (rd.lo + rd.hi) : 0.5 * (cfg.init_lo + cfg.init_hi);
        x[j] = c + 0.5 * (x[j] - c);
      }
      for (std::size_t i = 0; i < layout.relaxed_holes.size(); ++i)
        x[layout.n_reals + i] = 0.5 + 0.5 * (x[layout.n_reals + i] - 0.5);
    }
  };

  Phase1Result out;
  out.layout = layout;
  std::uint64_t total_evals = 0;
  int total_iters = 0;
  bool have_best = false;
  int attempts = std::max(1, cfg.num_restarts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::vector<double> x;
    if (attempt == 0 && warm && warm_layout) {
      // Carry over real unknowns by slot and relaxed holes by Boolean slot;
      // holes that are newly relaxed start at the undecided midpoint.
      x.assign(nv, 0.5);
      for (std::uint32_t k = 0; k < std::min(layout.n_reals, warm_layout->n_reals); ++k)
        x[k] = (*warm)[k];
      for (std::size_t i = 0; i < layout.relaxed_holes.size(); ++i) {
        int src = warm_layout->var_for_hole(layout.relaxed_holes[i]);
        if (src >= 0 && static_cast<std::size_t>(src) < warm->size())
          x[layout.n_reals + i] = (*warm)[src];
      }
    } else {
      draw(x);
    }
    pull_tame(x);

    NumResult res;
    bool cut = false;
    for (const auto& set : sets) {
      if (past_deadline(cfg)) {
        cut = true;
        break;
      }
      res = minimize_penalty(set, std::move(x), cfg);
      x = res.sigma;
      total_evals += res.evals;
      total_iters += res.iters;
    }
    if (cut) {
      // The hard-sharpness stage is the feasibility gate; a schedule cut short
      // of it cannot claim success.
      res.status = NumResult::Status::Unsat;
      res.note = "deadline";
      if (res.sigma.empty()) {
        res.sigma = std::move(x);
        res.residual = std::numeric_limits<double>::infinity();
      }
    }
    bool better = !have_best || res.residual < out.res.residual;
    bool sat = !cut && res.status == NumResult::Status::Sat;
    if (sat || better) {
      out.res = std::move(res);
      have_best = true;
    }
    if (sat || past_deadline(cfg)) break;
  }
  if (out.res.sigma.size() != nv) out.res.sigma.resize(nv, 0.0);
  out.res.evals = total_evals + pull_evals + draw_evals;
  out.res.iters = total_iters;
  return out;
}

}  // namespace gradsat
