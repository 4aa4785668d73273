#include "gradsat/smooth.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

namespace gradsat {

double sigmoid(double beta, double x) {
  double t = beta * x;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

double sop_value(SOp op, double a, double b, const SmoothParams& prm) {
  switch (op) {
    case SOp::Add: return a + b;
    case SOp::Sub: return a - b;
    case SOp::Mul: return a * b;
    case SOp::Div: return a * b / (b * b + prm.mu);
    case SOp::Neg: return -a;
    case SOp::Sin: return std::sin(a);
    case SOp::Cos: return std::cos(a);
    case SOp::Sqrt: return std::sqrt(a > prm.mu ? a : prm.mu);
    case SOp::Tanh: return std::tanh(a);
    case SOp::Exp: return std::exp(a);
    case SOp::Sigmoid: return sigmoid(prm.beta, a);
  }
  return 0.0;
}

void sop_partials(SOp op, double a, double b, double v, const SmoothParams& prm, double& da,
                  double& db) {
  da = 0.0;
  db = 0.0;
  switch (op) {
    case SOp::Add: da = 1.0; db = 1.0; break;
    case SOp::Sub: da = 1.0; db = -1.0; break;
    case SOp::Mul: da = b; db = a; break;
    case SOp::Div: {
      double d = b * b + prm.mu;
      da = b / d;
      db = a * (prm.mu - b * b) / (d * d);
      break;
    }
    case SOp::Neg: da = -1.0; break;
    case SOp::Sin: da = std::cos(a); break;
    case SOp::Cos: da = -std::sin(a); break;
    case SOp::Sqrt: da = a > prm.mu ? 0.5 / v : 0.0; break;
    case SOp::Tanh: da = 1.0 - v * v; break;
    case SOp::Exp: da = v; break;
    case SOp::Sigmoid: da = prm.beta * v * (1.0 - v); break;
  }
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

struct AbsBuilder {
  const Program& p;
  const InterfaceMap& I;
  SmoothParams prm;
  SmoothSet out;
  std::unordered_map<std::uint64_t, std::vector<SNodeId>> dedup;
  std::vector<SNodeId> post;      // program node -> smooth node (bool: post-pin)
  std::vector<SNodeId> hole_var;  // Boolean slot -> relaxed smooth var
  SNodeId one;

  AbsBuilder(const Program& prog, const InterfaceMap& imap, const SmoothParams& params)
      : p(prog), I(imap), prm(params) {
    out.params = prm;
    out.layout.n_reals = static_cast<std::uint32_t>(p.reals.size());
    post.assign(p.num_nodes(), kInvalidSNode);
    out.bool_smooth.assign(p.num_nodes(), kInvalidSNode);
    hole_var.assign(p.bools.size(), kInvalidSNode);
    one = sconst(1.0);
  }

  SNodeId intern(const SNode& n) {
    std::uint64_t h = static_cast<std::uint64_t>(n.kind);
    h = mix(h, static_cast<std::uint64_t>(n.op));
    h = mix(h, n.var);
    h = mix(h, std::bit_cast<std::uint64_t>(n.value));
    h = mix(h, n.a);
    h = mix(h, n.b);
    auto& bucket = dedup[h];
    for (SNodeId id : bucket) {
      const SNode& m = out.nodes[id];
      if (m.kind == n.kind && m.op == n.op && m.var == n.var && m.a == n.a && m.b == n.b &&
          m.nargs == n.nargs &&
          std::bit_cast<std::uint64_t>(m.value) == std::bit_cast<std::uint64_t>(n.value))
        return id;
    }
    SNodeId id = static_cast<SNodeId>(out.nodes.size());
    out.nodes.push_back(n);
    bucket.push_back(id);
    return id;
  }

  SNodeId sconst(double v) {
    SNode n;
    n.kind = SKind::Const;
    n.value = v;
    return intern(n);
  }

  SNodeId svar(std::uint32_t idx) {
    SNode n;
    n.kind = SKind::Var;
    n.var = idx;
    return intern(n);
  }

  bool is_const(SNodeId id, double* v = nullptr) const {
    if (out.nodes[id].kind != SKind::Const) return false;
    if (v) *v = out.nodes[id].value;
    return true;
  }

  SNodeId sop1(SOp op, SNodeId a) {
    double va;
    if (is_const(a, &va)) return sconst(sop_value(op, va, 0.0, prm));
    SNode n;
    n.kind = SKind::Op;
    n.op = op;
    n.nargs = 1;
    n.a = a;
    return intern(n);
  }

  SNodeId sop2(SOp op, SNodeId a, SNodeId b) {
    double va, vb;
    if (is_const(a, &va) && is_const(b, &vb)) return sconst(sop_value(op, va, vb, prm));
    SNode n;
    n.kind = SKind::Op;
    n.op = op;
    n.nargs = 2;
    n.a = a;
    n.b = b;
    return intern(n);
  }

  SNodeId blend(SNodeId gate, SNodeId e1, SNodeId e2) {
    // e1 * gate + e2 * (1 - gate)
    return sop2(SOp::Add, sop2(SOp::Mul, e1, gate),
                sop2(SOp::Mul, e2, sop2(SOp::Sub, one, gate)));
  }

  // Soft minimum: e1 * t + e2 * (1 - t) with t = sigmoid(e2 - e1). Sentinel
  // constants from pinned operands select the other side exactly.
  SNodeId smooth_and(SNodeId e1, SNodeId e2) {
    double c;
    if (is_const(e1, &c)) {
      if (c >= prm.K) return e2;
      if (c <= -prm.K) return e1;
    }
    if (is_const(e2, &c)) {
      if (c >= prm.K) return e1;
      if (c <= -prm.K) return e2;
    }
    SNodeId t = sop1(SOp::Sigmoid, sop2(SOp::Sub, e2, e1));
    return blend(t, e1, e2);
  }

  // Branch blend gated by a smoothed condition; pinned conditions collapse to
  // the taken branch with no sigmoid.
  SNodeId smooth_ite(SNodeId cond, SNodeId e1, SNodeId e2) {
    double c;
    if (is_const(cond, &c)) {
      if (c >= prm.K) return e1;
      if (c <= -prm.K) return e2;
    }
    return blend(sop1(SOp::Sigmoid, cond), e1, e2);
  }

  void emit(SNodeId expr, ConstraintProv prov) {
    double c;
    if (is_const(expr, &c) && c >= 0.0) return;  // trivially satisfied
    out.constraints.push_back(SmoothConstraint{expr, prov});
  }

  SNodeId relaxed_hole(std::uint32_t y) {
    if (hole_var[y] != kInvalidSNode) return hole_var[y];
    std::uint32_t idx = out.layout.total();
    out.layout.relaxed_holes.push_back(y);
    SNodeId xv = svar(idx);
    hole_var[y] = xv;
    emit(xv, ConstraintProv{ConstraintProv::HoleLo, kInvalidNode, y});
    emit(sop2(SOp::Sub, one, xv), ConstraintProv{ConstraintProv::HoleHi, kInvalidNode, y});
    SNodeId spread = sop2(SOp::Mul, xv, sop2(SOp::Sub, one, xv));
    emit(sop2(SOp::Sub, sconst(prm.delta()), spread),
         ConstraintProv{ConstraintProv::HoleTight, kInvalidNode, y});
    return xv;
  }

  // Iterative post-order transform of the DAG rooted at `root`.
  void transform(NodeId root) {
    if (post[root] != kInvalidSNode) return;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
      NodeId id = stack.back();
      if (post[id] != kInvalidSNode) {
        stack.pop_back();
        continue;
      }
      const Node& n = p.nodes[id];
      bool ready = true;
      for (int i = n.nchild - 1; i >= 0; --i) {
        if (post[n.child[i]] == kInvalidSNode) {
          stack.push_back(n.child[i]);
          ready = false;
        }
      }
      if (!ready) continue;
      stack.pop_back();
      post[id] = build_node(id, n);
    }
  }

  SNodeId build_node(NodeId id, const Node& n) {
    switch (n.kind) {
      case NodeKind::RealVar:
        return svar(n.slot);
      case NodeKind::Const:
        return sconst(n.value);
      case NodeKind::Op: {
        SNodeId a = post[n.child[0]];
        switch (n.op) {
          case OpKind::Add: return sop2(SOp::Add, a, post[n.child[1]]);
          case OpKind::Sub: return sop2(SOp::Sub, a, post[n.child[1]]);
          case OpKind::Mul: return sop2(SOp::Mul, a, post[n.child[1]]);
          case OpKind::Div: return sop2(SOp::Div, a, post[n.child[1]]);
          case OpKind::Neg: return sop1(SOp::Neg, a);
          case OpKind::Sin: return sop1(SOp::Sin, a);
          case OpKind::Cos: return sop1(SOp::Cos, a);
          case OpKind::Sqrt: return sop1(SOp::Sqrt, a);
          case OpKind::Tanh: return sop1(SOp::Tanh, a);
          case OpKind::Exp: return sop1(SOp::Exp, a);
        }
        return a;
      }
      case NodeKind::IteB:
        return smooth_ite(post[n.child[0]], post[n.child[1]], post[n.child[2]]);
      case NodeKind::IteH: {
        TriBool v = I.hole(n.slot);
        if (v == TriBool::True) return post[n.child[0]];
        if (v == TriBool::False) return post[n.child[1]];
        return smooth_ite2(relaxed_hole(n.slot), post[n.child[0]], post[n.child[1]]);
      }
      case NodeKind::Ge:
      case NodeKind::And:
      case NodeKind::Not: {
        SNodeId pre;
        if (n.kind == NodeKind::Ge) {
          pre = post[n.child[0]];
        } else if (n.kind == NodeKind::And) {
          pre = smooth_and(post[n.child[0]], post[n.child[1]]);
        } else {
          pre = sop1(SOp::Neg, post[n.child[0]]);
        }
        out.bool_smooth[id] = pre;
        TriBool v = I.node(id);
        if (v == TriBool::True) {
          emit(pre, ConstraintProv{ConstraintProv::PinTrue, id, 0});
          return sconst(prm.K);
        }
        if (v == TriBool::False) {
          emit(sop1(SOp::Neg, pre), ConstraintProv{ConstraintProv::PinFalse, id, 0});
          return sconst(-prm.K);
        }
        return pre;
      }
    }
    return kInvalidSNode;
  }

  SNodeId smooth_ite2(SNodeId xv, SNodeId e1, SNodeId e2) { return blend(xv, e1, e2); }

  SmoothSet run() {
    for (NodeId a : p.asserts) transform(a);
    for (NodeId id = 0; id < p.num_nodes(); ++id)
      if (p.is_bool_node(id)) transform(id);
    for (std::uint32_t i = 0; i < p.asserts.size(); ++i)
      emit(post[p.asserts[i]], ConstraintProv{ConstraintProv::Assert, p.asserts[i], i});
    return std::move(out);
  }
};

}  // namespace

SmoothSet abstract_num(const Program& p, const InterfaceMap& I, const SmoothParams& params) {
  return AbsBuilder(p, I, params).run();
}

void eval_smooth(const SmoothSet& set, const double* sigma, std::vector<double>& values) {
  values.resize(set.nodes.size());
  for (std::size_t i = 0; i < set.nodes.size(); ++i) {
    const SNode& n = set.nodes[i];
    switch (n.kind) {
      case SKind::Var: values[i] = sigma[n.var]; break;
      case SKind::Const: values[i] = n.value; break;
      case SKind::Op:
        values[i] = sop_value(n.op, values[n.a], n.nargs > 1 ? values[n.b] : 0.0, set.params);
        break;
    }
  }
}

}  // namespace gradsat
