#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <vector>

#include "gradsat/bench.hpp"
#include "gradsat/interface_map.hpp"
#include "gradsat/ir.hpp"
#include "gradsat/optimizer.hpp"
#include "gradsat/smooth.hpp"

using namespace gradsat;

namespace {

NodeId find_guard(const Program& p) {
  for (NodeId id = 0; id < p.num_nodes(); ++id) {
    const Node& n = p.node(id);
    if (n.kind == NodeKind::Ge && p.node(n.child[0]).kind == NodeKind::RealVar) return id;
  }
  return kInvalidNode;
}

}  // namespace

TEST_CASE("penalty descent lands inside a closed interval from any start") {
  Program p = parse_program("(assert (>= (- x 3) 0)) (assert (>= (- 4 x) 0))");
  SmoothParams prm;
  prm.beta = 1000.0;
  SmoothSet set = abstract_num(p, InterfaceMap::empty_for(p), prm);
  OptimizerConfig cfg;
  for (double x0 : {-50.0, 0.0, 3.5, 100.0}) {
    NumResult r = minimize_penalty(set, {x0}, cfg);
    CAPTURE(x0);
    CHECK(r.status == NumResult::Status::Sat);
    CHECK(r.residual <= cfg.eps);
    CHECK(r.sigma[0] >= 3.0 - 2 * cfg.eps);
    CHECK(r.sigma[0] <= 4.0 + 2 * cfg.eps);
    CHECK(r.evals > 0);
  }
}

TEST_CASE("steepest-descent fallback also converges") {
  Program p = parse_program("(assert (>= (- x 3) 0)) (assert (>= (- 4 x) 0))");
  SmoothParams prm;
  prm.beta = 1000.0;
  SmoothSet set = abstract_num(p, InterfaceMap::empty_for(p), prm);
  OptimizerConfig cfg;
  cfg.quasi_newton = false;
  cfg.max_iters = 4000;  // first-order needs more steps
  NumResult r = minimize_penalty(set, {-20.0}, cfg);
  CHECK(r.status == NumResult::Status::Sat);
  CHECK(r.sigma[0] >= 3.0 - 2 * cfg.eps);
  CHECK(r.sigma[0] <= 4.0 + 2 * cfg.eps);
}

TEST_CASE("residual is the worst violation, clamped at zero") {
  Program p = parse_program("(assert (>= x 0)) (assert (>= (- x 2) 0))");
  SmoothParams prm;
  prm.beta = 1000.0;
  SmoothSet set = abstract_num(p, InterfaceMap::empty_for(p), prm);
  double inside[] = {5.0};
  CHECK(constraint_residual(set, inside) == 0.0);
  double edge[] = {2.0};
  CHECK(constraint_residual(set, edge) == 0.0);
  double outside[] = {0.5};
  CHECK(constraint_residual(set, outside) == doctest::Approx(1.5));
  double far[] = {-3.0};
  CHECK(constraint_residual(set, far) == doctest::Approx(5.0));
}

TEST_CASE("full continuation solves a bounded interval program") {
  Program p = parse_program("(real x -10 10) (assert (>= (- x 3) 0)) (assert (>= (- 4 x) 0))");
  InterfaceMap I = InterfaceMap::empty_for(p);
  OptimizerConfig cfg;
  cfg.seed = 11;
  Phase1Result r = solve_phase1(p, I, cfg);
  REQUIRE(r.res.status == NumResult::Status::Sat);
  CHECK(r.layout.n_reals == 1);
  CHECK(r.res.sigma[0] >= 3.0 - 1e-3);
  CHECK(r.res.sigma[0] <= 4.0 + 1e-3);
  // The exact point satisfies the program after clamping-free verify.
  CHECK(p.verify({{r.res.sigma[0]}, {}}));
}

TEST_CASE("an empty-interior system reports numerical failure") {
  // x >= 1 together with -1 - x >= 0 (x <= -1) has no solution.
  Program p = parse_program("(assert (>= x 1)) (assert (>= (- (- 0 1) x) 0))");
  OptimizerConfig cfg;
  cfg.seed = 5;
  cfg.num_restarts = 3;
  Phase1Result r = solve_phase1(p, InterfaceMap::empty_for(p), cfg);
  CHECK(r.res.status == NumResult::Status::Unsat);
  CHECK(r.res.residual > 0.0);
}

TEST_CASE("an expired deadline cuts the search short with a sized point") {
  // Large unrolled program; a deadline in the past must come back quickly
  // instead of running the full continuation, and the reported point must
  // still have one slot per unknown so callers can warm-start from it.
  BenchInfo bench = gen_thermostat(200, 2.0, 100.0, PhysicsConfig{});
  OptimizerConfig cfg;
  cfg.seed = 8;
  cfg.deadline = std::chrono::steady_clock::now();
  auto t0 = std::chrono::steady_clock::now();
  Phase1Result r = solve_phase1(bench.program, InterfaceMap::empty_for(bench.program), cfg);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.res.status == NumResult::Status::Unsat);
  CHECK(r.res.sigma.size() == r.layout.total());
  CHECK(ms < 5000);
}

TEST_CASE("pinning the guard steers descent into the chosen branch") {
  Program p = parse_program("(assert (>= (ite (>= x1 0) x2 x3) 0))");
  NodeId guard = find_guard(p);
  REQUIRE(guard != kInvalidNode);
  InterfaceMap I = InterfaceMap::empty_for(p);
  I.set_node(guard, false);
  OptimizerConfig cfg;
  cfg.seed = 2;

  // Warm start from the worked point (1, 1, -1): x1 must fall to <= eps and
  // x3 must rise to >= -eps.
  std::vector<double> warm{1.0, 1.0, -1.0};
  VarLayout wl;
  wl.n_reals = 3;
  Phase1Result r = solve_phase1(p, I, cfg, &warm, &wl);
  REQUIRE(r.res.status == NumResult::Status::Sat);
  CHECK(r.res.sigma[0] <= cfg.eps);
  CHECK(r.res.sigma[2] >= -cfg.eps);
}

TEST_CASE("identical seeds reproduce identical trajectories") {
  Program p = parse_program("(real x -6 6)(real y -6 6)"
                            "(assert (>= (- (* x y) 2) 0)) (assert (>= (- 3 (* x y)) 0))");
  OptimizerConfig cfg;
  cfg.seed = 99;
  Phase1Result a = solve_phase1(p, InterfaceMap::empty_for(p), cfg);
  Phase1Result b = solve_phase1(p, InterfaceMap::empty_for(p), cfg);
  REQUIRE(a.res.status == b.res.status);
  REQUIRE(a.res.sigma.size() == b.res.sigma.size());
  for (std::size_t i = 0; i < a.res.sigma.size(); ++i) CHECK(a.res.sigma[i] == b.res.sigma[i]);
  CHECK(a.res.evals == b.res.evals);
}

TEST_CASE("restarts keep the best residual found") {
  // Feasible only in a narrow band; several seeds give several basins.
  Program p = parse_program(
      "(real x -8 8)(assert (>= (- (sin x) 0.99) 0))");
  OptimizerConfig cfg;
  cfg.seed = 123;
  cfg.num_restarts = 6;
  Phase1Result many = solve_phase1(p, InterfaceMap::empty_for(p), cfg);
  cfg.num_restarts = 1;
  Phase1Result one = solve_phase1(p, InterfaceMap::empty_for(p), cfg);
  CHECK(many.res.residual <= one.res.residual + 1e-12);
}

TEST_CASE("relaxed Boolean unknowns are rounded off the fence by tightening") {
  // Both branch choices are feasible; the relaxation must still settle at a
  // near-integral value because of the tightness constraint.
  Program p = parse_program(R"(
    (real x -5 5)
    (bool y)
    (assert (>= (iteh y (- x 1) (- 1 x)) 0))
  )");
  OptimizerConfig cfg;
  cfg.seed = 31;
  Phase1Result r = solve_phase1(p, InterfaceMap::empty_for(p), cfg);
  REQUIRE(r.res.status == NumResult::Status::Sat);
  REQUIRE(r.layout.relaxed_holes.size() == 1);
  double rv = r.res.sigma[r.layout.n_reals];
  double dist = std::min(std::fabs(rv), std::fabs(1.0 - rv));
  // delta = 0.1 / beta at the final sharpness, membrane width ~ 1e-4.
  CHECK(dist <= 2e-3);
}

TEST_CASE("warm starts carry matching slots across different layouts") {
  Program p = parse_program(R"(
    (real x -5 5)
    (bool y)
    (assert (>= (iteh y (- x 2) (- (- 0 2) x)) 0))
  )");
  OptimizerConfig cfg;
  cfg.seed = 8;
  // First solve with the unknown relaxed.
  Phase1Result first = solve_phase1(p, InterfaceMap::empty_for(p), cfg);
  REQUIRE(first.res.status == NumResult::Status::Sat);
  // Then pin the unknown to the rounded value and warm-start from the old
  // point; the real slot must transfer (the run converges immediately).
  InterfaceMap I = InterfaceMap::empty_for(p);
  I.set_hole(0, first.res.sigma[first.layout.n_reals] >= 0.5);
  Phase1Result second = solve_phase1(p, I, cfg, &first.res.sigma, &first.layout);
  REQUIRE(second.res.status == NumResult::Status::Sat);
  CHECK(second.layout.relaxed_holes.empty());
  CHECK(p.verify({{second.res.sigma[0]}, {I.hole(0) == TriBool::True}}));
}
