#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gradsat/ir.hpp"

namespace gradsat {

enum class TriBool : std::uint8_t { False = 0, True = 1, Unset = 2 };

// Partial truth assignment over a program's Boolean expressions and Boolean
// unknowns: the contract between the SAT side and the numerical side.
class InterfaceMap {
 public:
  InterfaceMap() = default;
  InterfaceMap(std::size_t num_nodes, std::size_t num_holes)
      : node_vals_(num_nodes, TriBool::Unset), hole_vals_(num_holes, TriBool::Unset) {}

  static InterfaceMap empty_for(const Program& p) {
    return InterfaceMap(p.num_nodes(), p.bools.size());
  }

  TriBool node(NodeId id) const { return node_vals_[id]; }
  TriBool hole(std::uint32_t y) const { return hole_vals_[y]; }

  void set_node(NodeId id, bool v) { node_vals_[id] = v ? TriBool::True : TriBool::False; }
  void set_hole(std::uint32_t y, bool v) { hole_vals_[y] = v ? TriBool::True : TriBool::False; }
  void unset_node(NodeId id) { node_vals_[id] = TriBool::Unset; }
  void unset_hole(std::uint32_t y) { hole_vals_[y] = TriBool::Unset; }

  void clear() {
    for (auto& v : node_vals_) v = TriBool::Unset;
    for (auto& v : hole_vals_) v = TriBool::Unset;
  }

  std::size_t num_set() const {
    std::size_t n = 0;
    for (auto v : node_vals_) n += v != TriBool::Unset;
    for (auto v : hole_vals_) n += v != TriBool::Unset;
    return n;
  }

  bool operator==(const InterfaceMap&) const = default;

 private:
  std::vector<TriBool> node_vals_;  // indexed by NodeId; meaningful for bool nodes
  std::vector<TriBool> hole_vals_;  // indexed by Boolean-unknown slot
};

}  // namespace gradsat
