#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gradsat/ir.hpp"

namespace gradsat {

// 1-based propositional variable, matching DIMACS numbering.
using PropVar = std::uint32_t;

struct CnfProblem {
  std::uint32_t num_vars = 0;
  // Clauses as DIMACS-signed literals (+v / -v), no terminating 0.
  std::vector<std::vector<int>> clauses;

  // Back-maps into the source program (empty for imported DIMACS).
  std::vector<PropVar> node_var;           // NodeId -> var (0 = none)
  std::vector<PropVar> hole_var;           // Boolean-unknown slot -> var
  std::vector<BoolItem> interface_items;   // aligned with interface_vars
  std::vector<PropVar> interface_vars;

  std::string to_dimacs() const;
};

// Tseitin encoding of the program's Boolean skeleton. Every Boolean
// expression node gets a variable with a full biconditional definition;
// Boolean unknowns get variables with no defining clauses; asserts become
// unit clauses. With interface_atoms_only the interface list is restricted
// to predicate atoms and unknowns (composite and/not nodes stay encoded but
// are not reported to the numerical side).
CnfProblem abstract_bool(const Program& p, bool interface_atoms_only = false);

CnfProblem parse_dimacs(std::string_view text);

}  // namespace gradsat
