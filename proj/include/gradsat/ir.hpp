#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gradsat {

// Dense index into a Program's node arena. Children always have smaller ids
// than their parents, so a forward scan is a topological order.
using NodeId = std::uint32_t;
inline constexpr NodeId kInvalidNode = 0xffffffffu;

enum class OpKind : std::uint8_t { Add, Sub, Mul, Div, Neg, Sin, Cos, Sqrt, Tanh, Exp };

int op_arity(OpKind op);
const char* op_name(OpKind op);

enum class NodeKind : std::uint8_t {
  RealVar,  // slot = real-unknown index
  Const,    // value
  Op,       // op, children
  IteB,     // child[0] = bool cond, child[1] = then, child[2] = else
  IteH,     // slot = bool-unknown index, child[0] = then, child[1] = else
  Ge,       // child[0] >= 0
  And,      // child[0] && child[1]
  Not       // !child[0]
};

inline bool is_bool_kind(NodeKind k) {
  return k == NodeKind::Ge || k == NodeKind::And || k == NodeKind::Not;
}

struct Node {
  NodeKind kind{NodeKind::Const};
  OpKind op{OpKind::Add};
  std::uint8_t nchild{0};
  std::uint32_t slot{0};  // real-unknown index (RealVar) or bool-unknown index (IteH)
  double value{0.0};      // Const payload
  std::array<NodeId, 3> child{kInvalidNode, kInvalidNode, kInvalidNode};
};

struct RealDecl {
  std::string name;
  bool bounded = false;
  double lo = 0.0;
  double hi = 0.0;
};

// Entry of the Boolean-expression index: either a BoolExpr arena node or a
// Boolean unknown. InterfaceMap and the SAT-side variable maps are keyed by
// this list.
struct BoolItem {
  bool is_hole = false;
  NodeId node = kInvalidNode;  // valid when !is_hole
  std::uint32_t hole = 0;      // valid when is_hole
};

struct Assignment {
  std::vector<double> reals;        // indexed by real-unknown slot
  std::vector<std::uint8_t> bools;  // 0/1, indexed by bool-unknown slot
};

struct EvalError : std::runtime_error {
  NodeId node;
  EvalError(NodeId n, const std::string& msg) : std::runtime_error(msg), node(n) {}
};

class Program {
 public:
  std::vector<Node> nodes;
  std::vector<NodeId> asserts;       // bound asserts first, then user asserts
  std::size_t num_bound_asserts = 0;
  std::vector<RealDecl> reals;
  std::vector<std::string> bools;

  std::size_t num_nodes() const { return nodes.size(); }
  const Node& node(NodeId id) const { return nodes[id]; }
  bool is_bool_node(NodeId id) const { return is_bool_kind(nodes[id].kind); }

  // All BoolExpr nodes in arena order followed by all Boolean unknowns.
  std::vector<BoolItem> collect_bool_nodes() const;

  double eval_real(NodeId n, const Assignment& sigma) const;
  int eval_bool(NodeId n, const Assignment& sigma) const;
  // One shared evaluation pass over many roots (real- or bool-valued).
  std::vector<double> eval_many(const std::vector<NodeId>& roots, const Assignment& sigma) const;
  // True iff every assert evaluates to 1 under the exact semantics.
  bool verify(const Assignment& sigma) const;

  std::string print() const;
};

// Arena builder with hash-consing: structurally identical subtrees share one
// node, so unrolled programs stay DAG-sized.
class ProgramBuilder {
 public:
  std::uint32_t add_real(std::string name);
  std::uint32_t add_real(std::string name, double lo, double hi);
  std::uint32_t add_bool(std::string name);

  NodeId real_var(std::uint32_t slot);
  NodeId constant(double c);
  NodeId op1(OpKind op, NodeId a);
  NodeId op2(OpKind op, NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b) { return op2(OpKind::Add, a, b); }
  NodeId sub(NodeId a, NodeId b) { return op2(OpKind::Sub, a, b); }
  NodeId mul(NodeId a, NodeId b) { return op2(OpKind::Mul, a, b); }
  NodeId div(NodeId a, NodeId b) { return op2(OpKind::Div, a, b); }
  NodeId neg(NodeId a) { return op1(OpKind::Neg, a); }
  NodeId ite(NodeId cond, NodeId then_e, NodeId else_e);
  NodeId iteh(std::uint32_t hole, NodeId then_e, NodeId else_e);
  NodeId ge0(NodeId e);                     // e >= 0
  NodeId ge(NodeId e, double c);            // e >= c, lowered to Ge(e - c)
  NodeId band(NodeId a, NodeId b);          // conjunction
  NodeId bnot(NodeId a);
  NodeId bor(NodeId a, NodeId b) { return bnot(band(bnot(a), bnot(b))); }

  void assert_node(NodeId b);

  bool is_bool(NodeId id) const { return is_bool_kind(nodes_[id].kind); }
  std::size_t num_reals() const { return reals_.size(); }
  std::size_t num_bools() const { return bools_.size(); }

  Program finish();

 private:
  NodeId intern(Node n);
  void check_real(NodeId id, const char* what) const;
  void check_bool(NodeId id, const char* what) const;

  std::vector<Node> nodes_;
  std::vector<RealDecl> reals_;
  std::vector<std::string> bools_;
  std::vector<NodeId> bound_asserts_;
  std::vector<NodeId> user_asserts_;
  std::unordered_map<std::uint64_t, std::vector<NodeId>> dedup_;
};

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) +
                           ": " + msg),
        line(l),
        col(c) {}
};

Program parse_program(std::string_view text);

bool structurally_equal(const Program& a, const Program& b);

}  // namespace gradsat
