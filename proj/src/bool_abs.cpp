#include "gradsat/bool_abs.hpp"

#include <charconv>
#include <stdexcept>

namespace gradsat {

std::string CnfProblem::to_dimacs() const {
  std::string out = "p cnf " + std::to_string(num_vars) + " " + std::to_string(clauses.size()) +
                    "\n";
  for (const auto& c : clauses) {
    for (int lit : c) {
      out += std::to_string(lit);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfProblem abstract_bool(const Program& p, bool interface_atoms_only) {
  CnfProblem cnf;
  cnf.node_var.assign(p.num_nodes(), 0);
  cnf.hole_var.assign(p.bools.size(), 0);

  auto items = p.collect_bool_nodes();
  PropVar next = 1;
  for (const auto& it : items) {
    if (it.is_hole)
      cnf.hole_var[it.hole] = next++;
    else
      cnf.node_var[it.node] = next++;
  }
  cnf.num_vars = next - 1;

  for (const auto& it : items) {
    if (it.is_hole) continue;
    const Node& n = p.node(it.node);
    int v = static_cast<int>(cnf.node_var[it.node]);
    switch (n.kind) {
      case NodeKind::Ge:
        break;  // atom: constrained only by the numerical side
      case NodeKind::Not: {
        int a = static_cast<int>(cnf.node_var[n.child[0]]);
        cnf.clauses.push_back({-v, -a});
        cnf.clauses.push_back({v, a});
        break;
      }
      case NodeKind::And: {
        int a = static_cast<int>(cnf.node_var[n.child[0]]);
        int b = static_cast<int>(cnf.node_var[n.child[1]]);
        cnf.clauses.push_back({-v, a});
        cnf.clauses.push_back({-v, b});
        cnf.clauses.push_back({v, -a, -b});
        break;
      }
      default:
        break;
    }
  }
  for (NodeId a : p.asserts)
    cnf.clauses.push_back({static_cast<int>(cnf.node_var[a])});

  for (const auto& it : items) {
    if (!it.is_hole && interface_atoms_only && p.node(it.node).kind != NodeKind::Ge) continue;
    cnf.interface_items.push_back(it);
    cnf.interface_vars.push_back(it.is_hole ? cnf.hole_var[it.hole] : cnf.node_var[it.node]);
  }
  return cnf;
}

CnfProblem parse_dimacs(std::string_view text) {
  CnfProblem cnf;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r' || text[pos] == '\n'))
      ++pos;
  };
  auto skip_line = [&] {
    while (pos < text.size() && text[pos] != '\n') ++pos;
  };
  auto read_int = [&](int& out) {
    auto res = std::from_chars(text.data() + pos, text.data() + text.size(), out);
    if (res.ec != std::errc()) throw std::runtime_error("dimacs: malformed number");
    pos = static_cast<std::size_t>(res.ptr - text.data());
  };
  bool have_header = false;
  std::vector<int> cur;
  while (true) {
    skip_ws();
    if (pos >= text.size()) break;
    char c = text[pos];
    if (c == 'c') {
      skip_line();
      continue;
    }
    if (c == 'p') {
      if (have_header) throw std::runtime_error("dimacs: duplicate header");
      if (text.substr(pos, 5) != "p cnf") throw std::runtime_error("dimacs: bad header");
      pos += 5;
      skip_ws();
      int vars = 0, clauses = 0;
      read_int(vars);
      skip_ws();
      read_int(clauses);
      if (vars < 0 || clauses < 0) throw std::runtime_error("dimacs: bad header counts");
      cnf.num_vars = static_cast<std::uint32_t>(vars);
      have_header = true;
      continue;
    }
    if (!have_header) throw std::runtime_error("dimacs: literals before the problem header");
    int lit = 0;
    read_int(lit);
    if (lit == 0) {
      cnf.clauses.push_back(cur);
      cur.clear();
    } else {
      std::uint32_t v = static_cast<std::uint32_t>(lit < 0 ? -lit : lit);
      if (v > cnf.num_vars)
        throw std::runtime_error("dimacs: literal exceeds declared variable count");
      cur.push_back(lit);
    }
  }
  if (!cur.empty()) cnf.clauses.push_back(cur);
  if (!have_header) throw std::runtime_error("dimacs: missing problem header");
  return cnf;
}

}  // namespace gradsat
