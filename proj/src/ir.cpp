#include "gradsat/ir.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_set>

namespace gradsat {

int op_arity(OpKind op) {
  switch (op) {
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::Div:
      return 2;
    default:
      return 1;
  }
}

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::Add: return "+";
    case OpKind::Sub: return "-";
    case OpKind::Mul: return "*";
    case OpKind::Div: return "/";
    case OpKind::Neg: return "-";
    case OpKind::Sin: return "sin";
    case OpKind::Cos: return "cos";
    case OpKind::Sqrt: return "sqrt";
    case OpKind::Tanh: return "tanh";
    case OpKind::Exp: return "exp";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Builder

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t node_hash(const Node& n) {
  std::uint64_t h = static_cast<std::uint64_t>(n.kind);
  h = mix(h, static_cast<std::uint64_t>(n.op));
  h = mix(h, n.slot);
  h = mix(h, std::bit_cast<std::uint64_t>(n.value));
  for (int i = 0; i < n.nchild; ++i) h = mix(h, n.child[i]);
  return h;
}

bool node_same(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.op != b.op || a.slot != b.slot || a.nchild != b.nchild) return false;
  if (std::bit_cast<std::uint64_t>(a.value) != std::bit_cast<std::uint64_t>(b.value)) return false;
  for (int i = 0; i < a.nchild; ++i)
    if (a.child[i] != b.child[i]) return false;
  return true;
}

}  // namespace

NodeId ProgramBuilder::intern(Node n) {
  auto& bucket = dedup_[node_hash(n)];
  for (NodeId id : bucket)
    if (node_same(nodes_[id], n)) return id;
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(n);
  bucket.push_back(id);
  return id;
}

void ProgramBuilder::check_real(NodeId id, const char* what) const {
  if (id >= nodes_.size() || is_bool_kind(nodes_[id].kind))
    throw std::logic_error(std::string(what) + ": expected a real-valued operand");
}

void ProgramBuilder::check_bool(NodeId id, const char* what) const {
  if (id >= nodes_.size() || !is_bool_kind(nodes_[id].kind))
    throw std::logic_error(std::string(what) + ": expected a Boolean operand");
}

std::uint32_t ProgramBuilder::add_real(std::string name) {
  reals_.push_back(RealDecl{std::move(name), false, 0.0, 0.0});
  return static_cast<std::uint32_t>(reals_.size() - 1);
}

std::uint32_t ProgramBuilder::add_real(std::string name, double lo, double hi) {
  if (!(lo <= hi)) throw std::logic_error("add_real: lo > hi for " + name);
  std::uint32_t slot = static_cast<std::uint32_t>(reals_.size());
  reals_.push_back(RealDecl{std::move(name), true, lo, hi});
  // Bounds become ordinary asserts: x - lo >= 0 and hi - x >= 0.
  NodeId x = real_var(slot);
  bound_asserts_.push_back(ge0(sub(x, constant(lo))));
  bound_asserts_.push_back(ge0(sub(constant(hi), x)));
  return slot;
}

std::uint32_t ProgramBuilder::add_bool(std::string name) {
  bools_.push_back(std::move(name));
  return static_cast<std::uint32_t>(bools_.size() - 1);
}

NodeId ProgramBuilder::real_var(std::uint32_t slot) {
  if (slot >= reals_.size()) throw std::logic_error("real_var: unknown slot");
  Node n;
  n.kind = NodeKind::RealVar;
  n.slot = slot;
  return intern(n);
}

NodeId ProgramBuilder::constant(double c) {
  if (!std::isfinite(c)) throw std::logic_error("constant: non-finite literal");
  Node n;
  n.kind = NodeKind::Const;
  n.value = c;
  return intern(n);
}

NodeId ProgramBuilder::op1(OpKind op, NodeId a) {
  if (op_arity(op) != 1) throw std::logic_error("op1: arity mismatch");
  check_real(a, op_name(op));
  Node n;
  n.kind = NodeKind::Op;
  n.op = op;
  n.nchild = 1;
  n.child[0] = a;
  return intern(n);
}

NodeId ProgramBuilder::op2(OpKind op, NodeId a, NodeId b) {
  if (op_arity(op) != 2) throw std::logic_error("op2: arity mismatch");
  check_real(a, op_name(op));
  check_real(b, op_name(op));
  Node n;
  n.kind = NodeKind::Op;
  n.op = op;
  n.nchild = 2;
  n.child[0] = a;
  n.child[1] = b;
  return intern(n);
}

NodeId ProgramBuilder::ite(NodeId cond, NodeId then_e, NodeId else_e) {
  check_bool(cond, "ite");
  check_real(then_e, "ite");
  check_real(else_e, "ite");
  Node n;
  n.kind = NodeKind::IteB;
  n.nchild = 3;
  n.child[0] = cond;
  n.child[1] = then_e;
  n.child[2] = else_e;
  return intern(n);
}

NodeId ProgramBuilder::iteh(std::uint32_t hole, NodeId then_e, NodeId else_e) {
  if (hole >= bools_.size()) throw std::logic_error("iteh: unknown Boolean slot");
  check_real(then_e, "iteh");
  check_real(else_e, "iteh");
  Node n;
  n.kind = NodeKind::IteH;
  n.slot = hole;
  n.nchild = 2;
  n.child[0] = then_e;
  n.child[1] = else_e;
  return intern(n);
}

NodeId ProgramBuilder::ge0(NodeId e) {
  check_real(e, ">=");
  Node n;
  n.kind = NodeKind::Ge;
  n.nchild = 1;
  n.child[0] = e;
  return intern(n);
}

NodeId ProgramBuilder::ge(NodeId e, double c) {
  if (c == 0.0) return ge0(e);
  return ge0(sub(e, constant(c)));
}

NodeId ProgramBuilder::band(NodeId a, NodeId b) {
  check_bool(a, "and");
  check_bool(b, "and");
  Node n;
  n.kind = NodeKind::And;
  n.nchild = 2;
  n.child[0] = a;
  n.child[1] = b;
  return intern(n);
}

NodeId ProgramBuilder::bnot(NodeId a) {
  check_bool(a, "not");
  Node n;
  n.kind = NodeKind::Not;
  n.nchild = 1;
  n.child[0] = a;
  return intern(n);
}

void ProgramBuilder::assert_node(NodeId b) {
  check_bool(b, "assert");
  user_asserts_.push_back(b);
}

Program ProgramBuilder::finish() {
  Program p;
  p.nodes = std::move(nodes_);
  p.reals = std::move(reals_);
  p.bools = std::move(bools_);
  p.asserts = bound_asserts_;
  p.asserts.insert(p.asserts.end(), user_asserts_.begin(), user_asserts_.end());
  p.num_bound_asserts = bound_asserts_.size();
  return p;
}

// ---------------------------------------------------------------------------
// Exact evaluation (lazy: untaken ite branches are never evaluated)

namespace {

struct EvalMemo {
  std::vector<double> val;
  std::vector<std::uint8_t> done;
  explicit EvalMemo(std::size_t n) : val(n, 0.0), done(n, 0) {}
};

double eval_node(const Program& p, NodeId root, const Assignment& sigma, EvalMemo& memo) {
  struct Frame {
    NodeId id;
    std::uint8_t stage;
  };
  std::vector<Frame> stack;
  stack.push_back({root, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Node& n = p.nodes[f.id];
    if (memo.done[f.id]) {
      stack.pop_back();
      continue;
    }
    switch (n.kind) {
      case NodeKind::RealVar:
        if (n.slot >= sigma.reals.size())
          throw EvalError(f.id, "assignment missing real unknown '" + p.reals[n.slot].name + "'");
        memo.val[f.id] = sigma.reals[n.slot];
        memo.done[f.id] = 1;
        stack.pop_back();
        break;
      case NodeKind::Const:
        memo.val[f.id] = n.value;
        memo.done[f.id] = 1;
        stack.pop_back();
        break;
      case NodeKind::Op: {
        if (f.stage == 0) {
          f.stage = 1;
          for (int i = n.nchild - 1; i >= 0; --i)
            if (!memo.done[n.child[i]]) stack.push_back({n.child[i], 0});
          break;
        }
        double a = memo.val[n.child[0]];
        double b = n.nchild > 1 ? memo.val[n.child[1]] : 0.0;
        double v = 0.0;
        switch (n.op) {
          case OpKind::Add: v = a + b; break;
          case OpKind::Sub: v = a - b; break;
          case OpKind::Mul: v = a * b; break;
          case OpKind::Div:
            if (b == 0.0) throw EvalError(f.id, "division by zero");
            v = a / b;
            break;
          case OpKind::Neg: v = -a; break;
          case OpKind::Sin: v = std::sin(a); break;
          case OpKind::Cos: v = std::cos(a); break;
          case OpKind::Sqrt:
            if (a < 0.0) throw EvalError(f.id, "sqrt of negative value");
            v = std::sqrt(a);
            break;
          case OpKind::Tanh: v = std::tanh(a); break;
          case OpKind::Exp: v = std::exp(a); break;
        }
        memo.val[f.id] = v;
        memo.done[f.id] = 1;
        stack.pop_back();
        break;
      }
      case NodeKind::IteB: {
        if (f.stage == 0) {
          f.stage = 1;
          if (!memo.done[n.child[0]]) stack.push_back({n.child[0], 0});
          break;
        }
        NodeId taken = memo.val[n.child[0]] != 0.0 ? n.child[1] : n.child[2];
        if (f.stage == 1) {
          f.stage = 2;
          if (!memo.done[taken]) stack.push_back({taken, 0});
          break;
        }
        memo.val[f.id] = memo.val[taken];
        memo.done[f.id] = 1;
        stack.pop_back();
        break;
      }
      case NodeKind::IteH: {
        if (n.slot >= sigma.bools.size())
          throw EvalError(f.id, "assignment missing Boolean unknown '" + p.bools[n.slot] + "'");
        NodeId taken = sigma.bools[n.slot] ? n.child[0] : n.child[1];
        if (f.stage == 0) {
          f.stage = 1;
          if (!memo.done[taken]) stack.push_back({taken, 0});
          break;
        }
        memo.val[f.id] = memo.val[taken];
        memo.done[f.id] = 1;
        stack.pop_back();
        break;
      }
      case NodeKind::Ge: {
        if (f.stage == 0) {
          f.stage = 1;
          if (!memo.done[n.child[0]]) stack.push_back({n.child[0], 0});
          break;
        }
        double v = memo.val[n.child[0]];
        // A comparison against an overflowed or undefined quantity has no
        // trustworthy truth value; refuse rather than guess.
        if (!std::isfinite(v)) throw EvalError(f.id, "comparison on non-finite value");
        memo.val[f.id] = v >= 0.0 ? 1.0 : 0.0;
        memo.done[f.id] = 1;
        stack.pop_back();
        break;
      }
      case NodeKind::And: {
        if (f.stage == 0) {
          f.stage = 1;
          if (!memo.done[n.child[0]]) stack.push_back({n.child[0], 0});
          if (!memo.done[n.child[1]]) stack.push_back({n.child[1], 0});
          break;
        }
        memo.val[f.id] = (memo.val[n.child[0]] != 0.0 && memo.val[n.child[1]] != 0.0) ? 1.0 : 0.0;
        memo.done[f.id] = 1;
        stack.pop_back();
        break;
      }
      case NodeKind::Not: {
        if (f.stage == 0) {
          f.stage = 1;
          if (!memo.done[n.child[0]]) stack.push_back({n.child[0], 0});
          break;
        }
        memo.val[f.id] = memo.val[n.child[0]] != 0.0 ? 0.0 : 1.0;
        memo.done[f.id] = 1;
        stack.pop_back();
        break;
      }
    }
  }
  return memo.val[root];
}

}  // namespace

double Program::eval_real(NodeId n, const Assignment& sigma) const {
  if (n >= nodes.size() || is_bool_node(n)) throw std::logic_error("eval_real: not a real node");
  EvalMemo memo(nodes.size());
  return eval_node(*this, n, sigma, memo);
}

int Program::eval_bool(NodeId n, const Assignment& sigma) const {
  if (n >= nodes.size() || !is_bool_node(n)) throw std::logic_error("eval_bool: not a bool node");
  EvalMemo memo(nodes.size());
  return eval_node(*this, n, sigma, memo) != 0.0 ? 1 : 0;
}

std::vector<double> Program::eval_many(const std::vector<NodeId>& roots,
                                       const Assignment& sigma) const {
  EvalMemo memo(nodes.size());
  std::vector<double> out;
  out.reserve(roots.size());
  for (NodeId r : roots) out.push_back(eval_node(*this, r, sigma, memo));
  return out;
}

bool Program::verify(const Assignment& sigma) const {
  // A candidate whose evaluation leaves the defined domain is not a model;
  // verification is conservative rather than crash-prone.
  try {
    EvalMemo memo(nodes.size());
    for (NodeId a : asserts)
      if (eval_node(*this, a, sigma, memo) == 0.0) return false;
    return true;
  } catch (const EvalError&) {
    return false;
  }
}

std::vector<BoolItem> Program::collect_bool_nodes() const {
  std::vector<BoolItem> out;
  for (NodeId id = 0; id < nodes.size(); ++id)
    if (is_bool_node(id)) out.push_back(BoolItem{false, id, 0});
  for (std::uint32_t y = 0; y < bools.size(); ++y)
    out.push_back(BoolItem{true, kInvalidNode, y});
  return out;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

void print_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

struct Printer {
  const Program& p;
  std::vector<std::uint32_t> refs;     // reference counts from printed roots
  std::vector<std::uint32_t> height;
  std::vector<std::string> def_name;   // non-empty => printed via a def
  std::unordered_set<std::string> used_names;
  std::string out;

  explicit Printer(const Program& prog)
      : p(prog), refs(prog.nodes.size(), 0), height(prog.nodes.size(), 0),
        def_name(prog.nodes.size()) {
    for (const auto& r : p.reals) used_names.insert(r.name);
    for (const auto& b : p.bools) used_names.insert(b);
  }

  void count_refs(NodeId root) {
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      if (refs[id]++ > 0) continue;  // children counted once per unique parent visit
      const Node& n = p.nodes[id];
      for (std::uint32_t i = 0; i < n.nchild; ++i) stack.push_back(n.child[i]);
    }
  }

  bool needs_def(NodeId id) const {
    const Node& n = p.nodes[id];
    if (n.kind == NodeKind::Const || n.kind == NodeKind::RealVar) return false;
    return refs[id] >= 2 || (height[id] > 0 && height[id] % 32 == 0);
  }

  std::string fresh_def_name(std::uint32_t k) {
    std::string name = "$" + std::to_string(k);
    while (used_names.count(name)) name = "$" + name;
    used_names.insert(name);
    return name;
  }

  // Emit expression with defs already substituted by name.
  void emit_expr(NodeId root) {
    struct Frame {
      NodeId id;
      std::uint8_t stage;
    };
    std::vector<Frame> stack{{root, 0}};
    while (!stack.empty()) {
      Frame& f = stack.back();
      const Node& n = p.nodes[f.id];
      if (f.id != root && !def_name[f.id].empty()) {
        out += def_name[f.id];
        stack.pop_back();
        continue;
      }
      std::uint32_t nch = n.nchild;
      const char* head = nullptr;
      switch (n.kind) {
        case NodeKind::Const:
          print_double(out, n.value);
          stack.pop_back();
          continue;
        case NodeKind::RealVar:
          out += p.reals[n.slot].name;
          stack.pop_back();
          continue;
        case NodeKind::Op: head = op_name(n.op); break;
        case NodeKind::IteB: head = "ite"; break;
        case NodeKind::IteH: head = "iteh"; nch = 2; break;
        case NodeKind::Ge: head = ">="; break;
        case NodeKind::And: head = "and"; break;
        case NodeKind::Not: head = "not"; break;
      }
      if (f.stage == 0) {
        out += '(';
        out += head;
        if (n.kind == NodeKind::IteH) {
          out += ' ';
          out += p.bools[n.slot];
        }
      }
      if (f.stage < nch) {
        out += ' ';
        NodeId c = n.child[f.stage];
        ++f.stage;
        stack.push_back({c, 0});
        continue;
      }
      if (n.kind == NodeKind::Ge) out += " 0";
      out += ')';
      stack.pop_back();
    }
  }

  std::string run() {
    for (const auto& r : p.reals) {
      out += "(real ";
      out += r.name;
      if (r.bounded) {
        out += ' ';
        print_double(out, r.lo);
        out += ' ';
        print_double(out, r.hi);
      }
      out += ")\n";
    }
    for (const auto& b : p.bools) {
      out += "(bool ";
      out += b;
      out += ")\n";
    }
    for (NodeId id = 0; id < p.nodes.size(); ++id) {
      const Node& n = p.nodes[id];
      std::uint32_t h = 0;
      for (std::uint32_t i = 0; i < n.nchild; ++i) h = std::max(h, height[n.child[i]] + 1);
      height[id] = h;
    }
    std::vector<NodeId> roots(p.asserts.begin() + p.num_bound_asserts, p.asserts.end());
    for (NodeId r : roots) count_refs(r);
    std::uint32_t defk = 0;
    for (NodeId id = 0; id < p.nodes.size(); ++id) {
      if (refs[id] == 0 || !needs_def(id)) continue;
      std::string name = fresh_def_name(defk++);
      out += "(def ";
      out += name;
      out += ' ';
      emit_expr(id);
      out += ")\n";
      def_name[id] = std::move(name);
    }
    for (NodeId r : roots) {
      out += "(assert ";
      emit_expr(r);
      out += ")\n";
    }
    return std::move(out);
  }
};

}  // namespace

std::string Program::print() const { return Printer(*this).run(); }

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  enum Kind { LParen, RParen, Symbol, Number, End } kind;
  std::string text;
  double num = 0.0;
  int line = 1, col = 1;
};

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  int line = 1, col = 1;

  void advance(char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  Token next() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ';') {
        while (pos < src.size() && src[pos] != '\n') advance(src[pos]);
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(c);
        continue;
      }
      break;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (pos >= src.size()) {
      t.kind = Token::End;
      return t;
    }
    char c = src[pos];
    if (c == '(') {
      t.kind = Token::LParen;
      advance(c);
      return t;
    }
    if (c == ')') {
      t.kind = Token::RParen;
      advance(c);
      return t;
    }
    std::size_t start = pos;
    while (pos < src.size()) {
      char d = src[pos];
      if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\r' || d == '\n')
        break;
      advance(d);
    }
    t.text = std::string(src.substr(start, pos - start));
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    auto res = std::from_chars(b, e, t.num);
    if (res.ec == std::errc() && res.ptr == e) {
      t.kind = Token::Number;
    } else {
      t.kind = Token::Symbol;
    }
    return t;
  }
};

struct Parser {
  Lexer lex;
  Token cur;
  ProgramBuilder b;
  std::unordered_map<std::string, std::uint32_t> real_slots;
  std::unordered_map<std::string, std::uint32_t> bool_slots;
  std::unordered_map<std::string, NodeId> defs;
  int depth = 0;
  static constexpr int kMaxDepth = 10000;

  explicit Parser(std::string_view text) : lex{text} { cur = lex.next(); }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.col, msg);
  }

  void bump() { cur = lex.next(); }

  void expect_rparen(const Token& head, const char* form) {
    if (cur.kind != Token::RParen)
      fail(cur, std::string("too many arguments to '") + form + "'");
    (void)head;
    bump();
  }

  bool known(const std::string& name) const {
    return real_slots.count(name) || bool_slots.count(name) || defs.count(name);
  }

  std::uint32_t real_slot_for(const Token& t) {
    auto it = real_slots.find(t.text);
    if (it != real_slots.end()) return it->second;
    if (bool_slots.count(t.text)) fail(t, "Boolean unknown '" + t.text + "' used as a real");
    if (defs.count(t.text)) fail(t, "'" + t.text + "' is a definition, not an unknown");
    std::uint32_t slot = b.add_real(t.text);
    real_slots.emplace(t.text, slot);
    return slot;
  }

  NodeId parse_expr() {
    if (++depth > kMaxDepth) fail(cur, "expression nesting too deep");
    NodeId r = parse_expr_inner();
    --depth;
    return r;
  }

  NodeId parse_expr_inner() {
    Token t = cur;
    if (t.kind == Token::Number) {
      bump();
      return b.constant(t.num);
    }
    if (t.kind == Token::Symbol) {
      bump();
      auto d = defs.find(t.text);
      if (d != defs.end()) return d->second;
      return b.real_var(real_slot_for(t));
    }
    if (t.kind != Token::LParen) fail(t, "expected expression");
    bump();
    Token head = cur;
    if (head.kind != Token::Symbol) fail(head, "expected operator symbol");
    bump();
    const std::string& h = head.text;

    if (h == "+" || h == "*" || h == "/" || h == "-") {
      NodeId a = parse_expr();
      if (h == "-" && cur.kind == Token::RParen) {
        bump();
        return b.neg(a);
      }
      NodeId c = parse_expr();
      expect_rparen(head, h.c_str());
      if (h == "+") return b.add(a, c);
      if (h == "*") return b.mul(a, c);
      if (h == "/") return b.div(a, c);
      return b.sub(a, c);
    }
    if (h == "sin" || h == "cos" || h == "sqrt" || h == "tanh" || h == "exp") {
      NodeId a = parse_expr();
      expect_rparen(head, h.c_str());
      if (h == "sin") return b.op1(OpKind::Sin, a);
      if (h == "cos") return b.op1(OpKind::Cos, a);
      if (h == "sqrt") return b.op1(OpKind::Sqrt, a);
      if (h == "tanh") return b.op1(OpKind::Tanh, a);
      return b.op1(OpKind::Exp, a);
    }
    if (h == "ite") {
      NodeId c = parse_expr();
      if (!b.is_bool(c)) fail(head, "'ite' condition must be Boolean");
      NodeId e1 = parse_expr();
      NodeId e2 = parse_expr();
      expect_rparen(head, "ite");
      return b.ite(c, e1, e2);
    }
    if (h == "iteh") {
      Token y = cur;
      if (y.kind != Token::Symbol) fail(y, "'iteh' expects a Boolean unknown name");
      auto it = bool_slots.find(y.text);
      if (it == bool_slots.end()) fail(y, "undeclared Boolean unknown '" + y.text + "'");
      bump();
      NodeId e1 = parse_expr();
      NodeId e2 = parse_expr();
      expect_rparen(head, "iteh");
      return b.iteh(it->second, e1, e2);
    }
    if (h == ">=") {
      NodeId e = parse_expr();
      NodeId c = parse_expr();
      expect_rparen(head, ">=");
      // (>= e 0) lowers to Ge(e) directly; anything else to Ge(e - c).
      if (c == b.constant(0.0)) return b.ge0(e);
      return b.ge0(b.sub(e, c));
    }
    if (h == "and") {
      NodeId a = parse_expr();
      NodeId c = parse_expr();
      expect_rparen(head, "and");
      return b.band(a, c);
    }
    if (h == "not") {
      NodeId a = parse_expr();
      expect_rparen(head, "not");
      return b.bnot(a);
    }
    if (h == "hole-r") {
      Token x = cur;
      if (x.kind != Token::Symbol) fail(x, "'hole-r' expects an unknown name");
      bump();
      NodeId v = b.real_var(real_slot_for(x));
      expect_rparen(head, "hole-r");
      return v;
    }
    fail(head, "unknown operator '" + h + "'");
  }

  void parse_top() {
    while (cur.kind != Token::End) {
      Token t = cur;
      if (t.kind != Token::LParen) fail(t, "expected top-level form");
      bump();
      Token head = cur;
      if (head.kind != Token::Symbol) fail(head, "expected form name");
      bump();
      const std::string& h = head.text;
      if (h == "real") {
        Token name = cur;
        if (name.kind != Token::Symbol) fail(name, "'real' expects a name");
        if (known(name.text)) fail(name, "redeclaration of '" + name.text + "'");
        bump();
        if (cur.kind == Token::RParen) {
          real_slots.emplace(name.text, b.add_real(name.text));
          bump();
          continue;
        }
        Token lo = cur;
        if (lo.kind != Token::Number) fail(lo, "'real' bounds must be numbers");
        bump();
        Token hi = cur;
        if (hi.kind != Token::Number) fail(hi, "'real' bounds must be numbers");
        bump();
        if (lo.num > hi.num) fail(lo, "lower bound exceeds upper bound");
        expect_rparen(head, "real");
        real_slots.emplace(name.text, b.add_real(name.text, lo.num, hi.num));
      } else if (h == "bool") {
        Token name = cur;
        if (name.kind != Token::Symbol) fail(name, "'bool' expects a name");
        if (known(name.text)) fail(name, "redeclaration of '" + name.text + "'");
        bump();
        expect_rparen(head, "bool");
        bool_slots.emplace(name.text, b.add_bool(name.text));
      } else if (h == "def") {
        Token name = cur;
        if (name.kind != Token::Symbol) fail(name, "'def' expects a name");
        if (known(name.text)) fail(name, "redefinition of '" + name.text + "'");
        bump();
        NodeId e = parse_expr();
        expect_rparen(head, "def");
        defs.emplace(name.text, e);
      } else if (h == "assert") {
        Token at = cur;
        NodeId e = parse_expr();
        if (!b.is_bool(e)) fail(at, "'assert' expects a Boolean expression");
        expect_rparen(head, "assert");
        b.assert_node(e);
      } else {
        fail(head, "unknown top-level form '" + h + "'");
      }
    }
  }
};

}  // namespace

Program parse_program(std::string_view text) {
  Parser p(text);
  p.parse_top();
  return p.b.finish();
}

// ---------------------------------------------------------------------------
// Structural equality

bool structurally_equal(const Program& a, const Program& b) {
  if (a.reals.size() != b.reals.size() || a.bools.size() != b.bools.size()) return false;
  for (std::size_t i = 0; i < a.reals.size(); ++i) {
    const auto& ra = a.reals[i];
    const auto& rb = b.reals[i];
    if (ra.name != rb.name || ra.bounded != rb.bounded) return false;
    if (ra.bounded &&
        (std::bit_cast<std::uint64_t>(ra.lo) != std::bit_cast<std::uint64_t>(rb.lo) ||
         std::bit_cast<std::uint64_t>(ra.hi) != std::bit_cast<std::uint64_t>(rb.hi)))
      return false;
  }
  if (a.bools != b.bools) return false;
  if (a.asserts.size() != b.asserts.size() || a.num_bound_asserts != b.num_bound_asserts)
    return false;

  // Pairwise DAG walk with a visited-pair memo; children precede parents, so
  // marking a pair equal before visiting its children is sound for DAGs.
  std::unordered_set<std::uint64_t> memo;
  std::vector<std::pair<NodeId, NodeId>> stack;
  for (std::size_t i = 0; i < a.asserts.size(); ++i) stack.push_back({a.asserts[i], b.asserts[i]});
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    std::uint64_t key = (static_cast<std::uint64_t>(x) << 32) | y;
    if (memo.count(key)) continue;
    const Node& nx = a.nodes[x];
    const Node& ny = b.nodes[y];
    if (nx.kind != ny.kind || nx.op != ny.op || nx.slot != ny.slot || nx.nchild != ny.nchild)
      return false;
    if (std::bit_cast<std::uint64_t>(nx.value) != std::bit_cast<std::uint64_t>(ny.value))
      return false;
    memo.insert(key);
    std::uint32_t c = nx.nchild;
    for (std::uint32_t i = 0; i < c; ++i) stack.push_back({nx.child[i], ny.child[i]});
  }
  return true;
}

}  // namespace gradsat
