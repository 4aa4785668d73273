#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gradsat/ir.hpp"

using namespace gradsat;

TEST_CASE("builder interns structurally identical subtrees") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId a1 = b.add(b.real_var(x), b.constant(1.0));
  NodeId a2 = b.add(b.real_var(x), b.constant(1.0));
  CHECK(a1 == a2);
  NodeId a3 = b.add(b.real_var(x), b.constant(2.0));
  CHECK(a1 != a3);
  // -0.0 and 0.0 are distinct constants (bit-level identity).
  CHECK(b.constant(0.0) != b.constant(-0.0));
}

TEST_CASE("children always precede parents in the arena") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId e = b.mul(b.add(b.real_var(x), b.constant(3.0)), b.op1(OpKind::Sin, b.real_var(x)));
  b.assert_node(b.ge0(e));
  Program p = b.finish();
  for (NodeId id = 0; id < p.num_nodes(); ++id)
    for (int c = 0; c < p.node(id).nchild; ++c) CHECK(p.node(id).child[c] < id);
}

TEST_CASE("arithmetic and transcendental evaluation") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  auto y = b.add_real("y");
  NodeId vx = b.real_var(x), vy = b.real_var(y);
  Assignment s{{2.0, 3.0}, {}};
  Program p;

  NodeId sum = b.add(vx, vy);
  NodeId prod = b.mul(vx, vy);
  NodeId quot = b.div(vx, vy);
  NodeId diff = b.sub(vx, vy);
  NodeId negx = b.neg(vx);
  NodeId sx = b.op1(OpKind::Sin, vx);
  NodeId cx = b.op1(OpKind::Cos, vx);
  NodeId qx = b.op1(OpKind::Sqrt, vx);
  NodeId tx = b.op1(OpKind::Tanh, vx);
  NodeId ex = b.op1(OpKind::Exp, vx);
  b.assert_node(b.ge0(sum));
  p = b.finish();

  CHECK(p.eval_real(sum, s) == doctest::Approx(5.0));
  CHECK(p.eval_real(prod, s) == doctest::Approx(6.0));
  CHECK(p.eval_real(quot, s) == doctest::Approx(2.0 / 3.0));
  CHECK(p.eval_real(diff, s) == doctest::Approx(-1.0));
  CHECK(p.eval_real(negx, s) == doctest::Approx(-2.0));
  CHECK(p.eval_real(sx, s) == doctest::Approx(std::sin(2.0)));
  CHECK(p.eval_real(cx, s) == doctest::Approx(std::cos(2.0)));
  CHECK(p.eval_real(qx, s) == doctest::Approx(std::sqrt(2.0)));
  CHECK(p.eval_real(tx, s) == doctest::Approx(std::tanh(2.0)));
  CHECK(p.eval_real(ex, s) == doctest::Approx(std::exp(2.0)));
}

TEST_CASE("comparison is inclusive at zero") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId g = b.ge0(b.real_var(x));
  b.assert_node(g);
  Program p = b.finish();
  CHECK(p.eval_bool(g, {{0.0}, {}}) == 1);
  CHECK(p.eval_bool(g, {{1e-12}, {}}) == 1);
  CHECK(p.eval_bool(g, {{-1e-12}, {}}) == 0);
}

TEST_CASE("conjunction and negation") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId vx = b.real_var(x);
  NodeId both = b.band(b.ge0(vx), b.ge0(b.sub(b.constant(1.0), vx)));
  NodeId nn = b.bnot(both);
  b.assert_node(nn);
  Program p = b.finish();
  CHECK(p.eval_bool(both, {{0.5}, {}}) == 1);
  CHECK(p.eval_bool(both, {{2.0}, {}}) == 0);
  CHECK(p.eval_bool(nn, {{2.0}, {}}) == 1);
}

TEST_CASE("branch selection by guard and by Boolean unknown") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  auto y = b.add_bool("y");
  NodeId vx = b.real_var(x);
  NodeId e = b.ite(b.ge0(vx), b.constant(10.0), b.constant(20.0));
  NodeId h = b.iteh(y, b.constant(1.0), b.constant(2.0));
  b.assert_node(b.ge0(b.add(e, h)));
  Program p = b.finish();
  CHECK(p.eval_real(e, {{1.0}, {0}}) == 10.0);
  CHECK(p.eval_real(e, {{-1.0}, {0}}) == 20.0);
  CHECK(p.eval_real(h, {{0.0}, {1}}) == 1.0);
  CHECK(p.eval_real(h, {{0.0}, {0}}) == 2.0);
}

TEST_CASE("untaken branches are never evaluated") {
  // A division by zero in the dead branch must not raise.
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId vx = b.real_var(x);
  NodeId bad = b.div(b.constant(1.0), b.constant(0.0));
  NodeId e = b.ite(b.ge0(vx), vx, bad);
  b.assert_node(b.ge0(e));
  Program p = b.finish();
  CHECK(p.eval_real(e, {{2.0}, {}}) == 2.0);
  CHECK_THROWS_AS((void)p.eval_real(e, {{-2.0}, {}}), EvalError);
}

TEST_CASE("domain errors: exact division by zero and negative square root") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId vx = b.real_var(x);
  NodeId q = b.div(b.constant(1.0), vx);
  NodeId r = b.op1(OpKind::Sqrt, vx);
  b.assert_node(b.ge0(q));
  b.assert_node(b.ge0(r));
  Program p = b.finish();
  CHECK_THROWS_AS((void)p.eval_real(q, {{0.0}, {}}), EvalError);
  CHECK(p.eval_real(q, {{1e-300}, {}}) > 0.0);  // tiny but nonzero divides fine
  CHECK_THROWS_AS((void)p.eval_real(r, {{-1.0}, {}}), EvalError);
  CHECK(p.eval_real(r, {{0.0}, {}}) == 0.0);
}

TEST_CASE("comparison on a non-finite value is an error, not a truth value") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId e = b.op1(OpKind::Exp, b.op1(OpKind::Exp, b.real_var(x)));
  NodeId g = b.ge0(e);
  b.assert_node(g);
  Program p = b.finish();
  CHECK_THROWS_AS((void)p.eval_bool(g, {{1000.0}, {}}), EvalError);
}

TEST_CASE("declared bounds become ordinary asserts checked by verify") {
  ProgramBuilder b;
  auto x = b.add_real("x", -1.0, 2.0);
  b.assert_node(b.ge0(b.real_var(x)));
  Program p = b.finish();
  CHECK(p.num_bound_asserts == 2);
  CHECK(p.asserts.size() == 3);
  // Bound asserts come first: x - lo >= 0 then hi - x >= 0.
  const Node& lo = p.node(p.asserts[0]);
  REQUIRE(lo.kind == NodeKind::Ge);
  CHECK(p.node(lo.child[0]).kind == NodeKind::Op);
  CHECK(p.verify({{0.5}, {}}));
  CHECK_FALSE(p.verify({{3.0}, {}}));   // violates hi bound
  CHECK_FALSE(p.verify({{-0.5}, {}}));  // violates the user assert
}

TEST_CASE("verify is the conjunction of every assert") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId vx = b.real_var(x);
  b.assert_node(b.ge0(b.sub(vx, b.constant(3.0))));
  b.assert_node(b.ge0(b.sub(b.constant(4.0), vx)));
  Program p = b.finish();
  CHECK(p.verify({{3.0}, {}}));
  CHECK(p.verify({{4.0}, {}}));
  CHECK(p.verify({{3.5}, {}}));
  CHECK_FALSE(p.verify({{2.9}, {}}));
  CHECK_FALSE(p.verify({{4.1}, {}}));
}

TEST_CASE("verify reports false when evaluation hits a domain error") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  b.assert_node(b.ge0(b.div(b.constant(1.0), b.real_var(x))));
  Program p = b.finish();
  CHECK_FALSE(p.verify({{0.0}, {}}));
  CHECK(p.verify({{2.0}, {}}));
}

TEST_CASE("shared evaluation pass agrees with single-root evaluation") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId vx = b.real_var(x);
  NodeId e1 = b.mul(vx, vx);
  NodeId e2 = b.add(e1, b.constant(1.0));
  NodeId g = b.ge0(e2);
  b.assert_node(g);
  Program p = b.finish();
  Assignment s{{3.0}, {}};
  auto many = p.eval_many({e1, e2, g}, s);
  REQUIRE(many.size() == 3);
  CHECK(many[0] == p.eval_real(e1, s));
  CHECK(many[1] == p.eval_real(e2, s));
  CHECK(many[2] == 1.0);
}

TEST_CASE("boolean index lists expression nodes then unknowns") {
  ProgramBuilder b;
  auto x = b.add_real("x");
  auto y = b.add_bool("y");
  NodeId g = b.ge0(b.real_var(x));
  b.assert_node(g);
  b.assert_node(b.ge0(b.iteh(y, b.constant(1.0), b.constant(-1.0))));
  Program p = b.finish();
  auto items = p.collect_bool_nodes();
  REQUIRE(items.size() >= 2);
  CHECK_FALSE(items.front().is_hole);
  CHECK(items.back().is_hole);
  CHECK(items.back().hole == 0);
}

// ---------------------------------------------------------------------------
// Parsing

TEST_CASE("minimal single-assert source") {
  Program p = parse_program("(assert (>= (hole-r x1) 0))");
  CHECK(p.reals.size() == 1);
  CHECK(p.reals[0].name == "x1");
  CHECK(p.asserts.size() == 1);
  CHECK(p.node(p.asserts[0]).kind == NodeKind::Ge);
}

TEST_CASE("guarded choice over three auto-declared unknowns") {
  Program p = parse_program("(assert (>= (ite (>= x1 0) x2 x3) 0))");
  REQUIRE(p.reals.size() == 3);
  CHECK(p.reals[0].name == "x1");
  CHECK(p.reals[1].name == "x2");
  CHECK(p.reals[2].name == "x3");
  const Node& root = p.node(p.asserts[0]);
  REQUIRE(root.kind == NodeKind::Ge);
  CHECK(p.node(root.child[0]).kind == NodeKind::IteB);
  // Exact semantics: x1 < 0 selects the third unknown.
  CHECK(p.verify({{-1.0, 0.0, 5.0}, {}}));
  CHECK_FALSE(p.verify({{-1.0, 5.0, -1.0}, {}}));
}

TEST_CASE("comparison against a nonzero constant subtracts it") {
  Program p = parse_program("(assert (>= x 3))");
  const Node& root = p.node(p.asserts[0]);
  REQUIRE(root.kind == NodeKind::Ge);
  const Node& d = p.node(root.child[0]);
  REQUIRE(d.kind == NodeKind::Op);
  CHECK(d.op == OpKind::Sub);
  CHECK(p.verify({{3.0}, {}}));
  CHECK_FALSE(p.verify({{2.0}, {}}));
}

TEST_CASE("declarations: bounded reals and Boolean unknowns") {
  Program p = parse_program(R"(
    (real a -1 1)
    (real b)
    (bool y)
    (assert (>= (iteh y a b) 0))
  )");
  CHECK(p.reals.size() == 2);
  CHECK(p.reals[0].bounded);
  CHECK(p.reals[0].lo == -1.0);
  CHECK(p.reals[0].hi == 1.0);
  CHECK_FALSE(p.reals[1].bounded);
  CHECK(p.bools == std::vector<std::string>{"y"});
  CHECK(p.num_bound_asserts == 2);
}

TEST_CASE("definitions introduce shared subexpressions") {
  Program p = parse_program(R"(
    (def t (* x x))
    (assert (>= (+ t t) 1))
  )");
  const Node& root = p.node(p.asserts[0]);
  const Node& sum = p.node(p.node(root.child[0]).child[0]);
  CHECK(sum.child[0] == sum.child[1]);  // both operands are the same arena node
}

TEST_CASE("parse errors carry positions and reasons") {
  CHECK_THROWS_AS((void)parse_program("(assert (>= x 0)"), ParseError);   // unbalanced
  CHECK_THROWS_AS((void)parse_program("(assert (>= (iteh y 1 2) 0))"), ParseError);  // y unknown
  CHECK_THROWS_AS((void)parse_program("(assert x)"), ParseError);        // real at bool position
  CHECK_THROWS_AS((void)parse_program("(frob x)"), ParseError);          // unknown form
  CHECK_THROWS_AS((void)parse_program("(real x 2 1)"), ParseError);      // inverted bounds
  CHECK_THROWS_AS((void)parse_program("(real x) (real x)"), ParseError); // redeclaration
  try {
    (void)parse_program("(assert\n  (>= (iteh y 1 2) 0))");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("undeclared Boolean unknown") != std::string::npos);
  }
}

TEST_CASE("printing round-trips structurally") {
  const char* sources[] = {
      "(assert (>= (hole-r x1) 0))",
      "(assert (>= (ite (>= x1 0) x2 x3) 0))",
      "(real x -2 7)(bool y)(assert (>= (iteh y (sin x) (cos x)) 0))",
      "(def t (* x x))(assert (>= (+ t (sqrt t)) 1))(assert (not (>= t 100)))",
      "(assert (and (>= (tanh x) 0) (>= (exp (- x)) 1)))",
  };
  for (const char* src : sources) {
    CAPTURE(src);
    Program p = parse_program(src);
    Program q = parse_program(p.print());
    CHECK(structurally_equal(p, q));
    // And printing is a fixed point from the first reprint on.
    CHECK(q.print() == parse_program(q.print()).print());
  }
}

TEST_CASE("printing a deep shared chain stays linear in the DAG size") {
  // t_{k+1} = t_k + t_k doubles the tree size each level; the printed form
  // must stay small thanks to shared definitions.
  ProgramBuilder b;
  auto x = b.add_real("x");
  NodeId t = b.real_var(x);
  for (int i = 0; i < 200; ++i) t = b.add(t, t);
  b.assert_node(b.ge0(t));
  Program p = b.finish();
  std::string text = p.print();
  CHECK(text.size() < 20000);
  Program q = parse_program(text);
  CHECK(structurally_equal(p, q));
  CHECK(q.eval_real(q.node(q.asserts[0]).child[0], {{1.0}, {}}) ==
        doctest::Approx(std::pow(2.0, 200)));
}

TEST_CASE("random programs round-trip and evaluate identically after reprint") {
  std::mt19937_64 rng(12345);
  for (int iter = 0; iter < 60; ++iter) {
    ProgramBuilder b;
    auto x = b.add_real("x");
    auto y = b.add_real("y");
    auto h = b.add_bool("h");
    std::vector<NodeId> pool{b.real_var(x), b.real_var(y), b.constant(1.5), b.constant(-0.5)};
    for (int i = 0; i < 30; ++i) {
      NodeId a = pool[rng() % pool.size()];
      NodeId c = pool[rng() % pool.size()];
      switch (rng() % 7) {
        case 0: pool.push_back(b.add(a, c)); break;
        case 1: pool.push_back(b.sub(a, c)); break;
        case 2: pool.push_back(b.mul(a, c)); break;
        case 3: pool.push_back(b.op1(OpKind::Sin, a)); break;
        case 4: pool.push_back(b.op1(OpKind::Tanh, a)); break;
        case 5: pool.push_back(b.ite(b.ge0(a), a, c)); break;
        case 6: pool.push_back(b.iteh(h, a, c)); break;
      }
    }
    b.assert_node(b.ge0(pool.back()));
    b.assert_node(b.bnot(b.ge0(pool[pool.size() - 2])));
    Program p = b.finish();
    Program q = parse_program(p.print());
    REQUIRE(structurally_equal(p, q));
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int pt = 0; pt < 5; ++pt) {
      Assignment s{{U(rng), U(rng)}, {static_cast<std::uint8_t>(rng() & 1)}};
      CHECK(p.verify(s) == q.verify(s));
    }
  }
}
