#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gradsat/bool_abs.hpp"
#include "gradsat/ir.hpp"

using namespace gradsat;

namespace {

// Truth values of every Boolean node given chosen truth bits for the
// predicate atoms; composites follow from their children (children precede
// parents in the arena, so a forward scan works).
std::vector<int> skeleton_values(const Program& p, const std::vector<int>& atom_bits) {
  std::vector<int> val(p.num_nodes(), -1);
  std::size_t next_atom = 0;
  for (NodeId id = 0; id < p.num_nodes(); ++id) {
    const Node& n = p.node(id);
    switch (n.kind) {
      case NodeKind::Ge: val[id] = atom_bits[next_atom++]; break;
      case NodeKind::And: val[id] = val[n.child[0]] && val[n.child[1]]; break;
      case NodeKind::Not: val[id] = !val[n.child[0]]; break;
      default: break;
    }
  }
  return val;
}

std::size_t count_atoms(const Program& p) {
  std::size_t n = 0;
  for (NodeId id = 0; id < p.num_nodes(); ++id)
    if (p.node(id).kind == NodeKind::Ge) ++n;
  return n;
}

bool clause_satisfied(const std::vector<int>& clause, const std::vector<int>& assign) {
  for (int lit : clause) {
    int v = assign[static_cast<std::size_t>(lit < 0 ? -lit : lit)];
    if ((lit > 0 && v == 1) || (lit < 0 && v == 0)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("guarded-choice source yields two variables and one unit clause") {
  Program p = parse_program("(assert (>= (ite (>= x1 0) x2 x3) 0))");
  CnfProblem cnf = abstract_bool(p);
  CHECK(cnf.num_vars == 2);
  REQUIRE(cnf.clauses.size() == 1);
  REQUIRE(cnf.clauses[0].size() == 1);
  int unit = cnf.clauses[0][0];
  CHECK(unit > 0);
  // The unit clause pins the assert root, not the guard.
  CHECK(static_cast<PropVar>(unit) == cnf.node_var[p.asserts[0]]);
}

TEST_CASE("negation and conjunction produce full biconditional definitions") {
  Program p = parse_program("(assert (not (and (>= x 0) (>= y 0))))");
  CnfProblem cnf = abstract_bool(p);
  // Atoms a, b; composite c = and, n = not; assert unit on n.
  CHECK(cnf.num_vars == 4);
  std::size_t n2 = 0, n3 = 0, n1 = 0;
  for (const auto& c : cnf.clauses) {
    if (c.size() == 1) ++n1;
    if (c.size() == 2) ++n2;
    if (c.size() == 3) ++n3;
  }
  CHECK(n1 == 1);  // the assert
  CHECK(n2 == 4);  // two for the negation, two one-sided for the conjunction
  CHECK(n3 == 1);  // the closing clause of the conjunction
}

TEST_CASE("unknowns get variables but no defining clauses") {
  Program p = parse_program(R"(
    (bool y)
    (assert (>= (iteh y x 1) 0))
  )");
  CnfProblem cnf = abstract_bool(p);
  REQUIRE(cnf.hole_var.size() == 1);
  PropVar hv = cnf.hole_var[0];
  CHECK(hv >= 1);
  CHECK(hv <= cnf.num_vars);
  for (const auto& c : cnf.clauses)
    for (int lit : c) CHECK(static_cast<PropVar>(lit < 0 ? -lit : lit) != hv);
}

TEST_CASE("interface list covers all Boolean nodes, or atoms only on request") {
  Program p = parse_program(R"(
    (bool y)
    (assert (not (and (>= (iteh y x 1) 0) (>= x 2))))
  )");
  CnfProblem full = abstract_bool(p, false);
  CnfProblem atoms = abstract_bool(p, true);
  // Full: Ge, Ge, And, Not, plus the unknown.
  CHECK(full.interface_items.size() == 5);
  CHECK(atoms.interface_items.size() == 3);  // two atoms + the unknown
  REQUIRE(full.interface_vars.size() == full.interface_items.size());
  for (std::size_t i = 0; i < full.interface_items.size(); ++i) {
    const BoolItem& it = full.interface_items[i];
    PropVar expect = it.is_hole ? full.hole_var[it.hole] : full.node_var[it.node];
    CHECK(full.interface_vars[i] == expect);
  }
  for (const BoolItem& it : atoms.interface_items)
    if (!it.is_hole) CHECK(p.node(it.node).kind == NodeKind::Ge);
}

TEST_CASE("encoding is equisatisfiable with the Boolean skeleton by enumeration") {
  std::mt19937_64 rng(777);
  int checked_programs = 0;
  while (checked_programs < 40) {
    ProgramBuilder b;
    auto x = b.add_real("x");
    auto y = b.add_real("y");
    auto h = b.add_bool("h");
    NodeId vx = b.real_var(x), vy = b.real_var(y);
    std::vector<NodeId> reals{vx, vy, b.constant(1.0), b.iteh(h, vx, vy)};
    std::vector<NodeId> bools;
    for (int i = 0; i < 4; ++i) {
      bools.push_back(b.ge0(b.sub(reals[rng() % reals.size()],
                                  b.constant(static_cast<double>(rng() % 5)))));
    }
    for (int i = 0; i < 8; ++i) {
      NodeId a = bools[rng() % bools.size()];
      NodeId c = bools[rng() % bools.size()];
      bools.push_back(rng() % 3 == 0 ? b.bnot(a) : b.band(a, c));
    }
    b.assert_node(bools[bools.size() - 1]);
    b.assert_node(bools[bools.size() - 3]);
    Program p = b.finish();

    std::size_t atoms = count_atoms(p);
    std::size_t holes = p.bools.size();
    if (atoms + holes > 12) continue;
    ++checked_programs;

    CnfProblem cnf = abstract_bool(p);
    for (std::uint32_t mask = 0; mask < (1u << (atoms + holes)); ++mask) {
      std::vector<int> atom_bits(atoms);
      for (std::size_t i = 0; i < atoms; ++i) atom_bits[i] = (mask >> i) & 1;
      std::vector<int> val = skeleton_values(p, atom_bits);

      // Build the full variable assignment: atoms + composites from the
      // skeleton, unknowns from the remaining mask bits.
      std::vector<int> assign(cnf.num_vars + 1, 0);
      for (NodeId id = 0; id < p.num_nodes(); ++id)
        if (cnf.node_var.size() > id && cnf.node_var[id] != 0)
          assign[cnf.node_var[id]] = val[id];
      for (std::size_t s = 0; s < holes; ++s)
        assign[cnf.hole_var[s]] = (mask >> (atoms + s)) & 1;

      bool semantic = true;
      for (NodeId a : p.asserts) semantic = semantic && val[a] == 1;
      bool clauses_ok = true;
      for (const auto& c : cnf.clauses) clauses_ok = clauses_ok && clause_satisfied(c, assign);
      REQUIRE(clauses_ok == semantic);

      // Composite values are forced: flipping any composite variable must
      // falsify at least one clause.
      if (mask % 7 == 0) {
        for (NodeId id = 0; id < p.num_nodes(); ++id) {
          NodeKind k = p.node(id).kind;
          if (k != NodeKind::And && k != NodeKind::Not) continue;
          PropVar v = cnf.node_var[id];
          std::vector<int> flipped = assign;
          flipped[v] ^= 1;
          bool still_ok = true;
          for (const auto& c : cnf.clauses) still_ok = still_ok && clause_satisfied(c, flipped);
          REQUIRE_FALSE(still_ok);
        }
      }
    }
  }
}

TEST_CASE("DIMACS export and import round-trip") {
  Program p = parse_program("(assert (not (and (>= x 0) (not (>= y 1)))))");
  CnfProblem cnf = abstract_bool(p);
  std::string text = cnf.to_dimacs();
  CHECK(text.rfind("p cnf ", 0) == 0);
  CnfProblem back = parse_dimacs(text);
  CHECK(back.num_vars == cnf.num_vars);
  REQUIRE(back.clauses.size() == cnf.clauses.size());
  for (std::size_t i = 0; i < cnf.clauses.size(); ++i) CHECK(back.clauses[i] == cnf.clauses[i]);
}

TEST_CASE("DIMACS import skips comments and validates literals") {
  CnfProblem c = parse_dimacs("c a comment\np cnf 3 2\n1 -2 0\n-1 3 0\n");
  CHECK(c.num_vars == 3);
  REQUIRE(c.clauses.size() == 2);
  CHECK(c.clauses[0] == std::vector<int>{1, -2});
  CHECK(c.clauses[1] == std::vector<int>{-1, 3});
  CHECK_THROWS((void)parse_dimacs("p cnf 2 1\n5 0\n"));   // literal out of range
  CHECK_THROWS((void)parse_dimacs("1 2 0\n"));            // missing header
}
