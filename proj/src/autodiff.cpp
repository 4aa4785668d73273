#include "gradsat/autodiff.hpp"

#include <cmath>
#include <cstring>

namespace gradsat {

SNodeId eval_with_grad(const SmoothSet& set, const double* sigma, GradWorkspace& ws) {
  const std::size_t nn = set.nodes.size();
  const std::uint32_t nv = set.layout.total();
  ws.nvars = nv;
  ws.values.resize(nn);
  ws.grad.assign(nn * std::size_t(nv), 0.0);
  SNodeId bad = kInvalidSNode;
  for (std::size_t i = 0; i < nn; ++i) {
    const SNode& n = set.nodes[i];
    double* g = ws.grad.data() + i * nv;
    switch (n.kind) {
      case SKind::Var:
        ws.values[i] = sigma[n.var];
        g[n.var] = 1.0;
        break;
      case SKind::Const:
        ws.values[i] = n.value;
        break;
      case SKind::Op: {
        double a = ws.values[n.a];
        double b = n.nargs > 1 ? ws.values[n.b] : 0.0;
        double v = sop_value(n.op, a, b, set.params);
        ws.values[i] = v;
        double da, db;
        sop_partials(n.op, a, b, v, set.params, da, db);
        const double* ga = ws.grad.data() + std::size_t(n.a) * nv;
        if (n.nargs > 1) {
          const double* gb = ws.grad.data() + std::size_t(n.b) * nv;
          for (std::uint32_t k = 0; k < nv; ++k) g[k] = da * ga[k] + db * gb[k];
        } else {
          for (std::uint32_t k = 0; k < nv; ++k) g[k] = da * ga[k];
        }
        break;
      }
    }
    if (bad == kInvalidSNode && !std::isfinite(ws.values[i])) bad = static_cast<SNodeId>(i);
  }
  ws.node_visits += nn;
  return bad;
}

}  // namespace gradsat
