// ndgrad/graph.cc

// Copyright 2026  The DFLS Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "ndgrad/graph.h"

#include <algorithm>
#include <cmath>

namespace dfls {
namespace ndgrad {

namespace {

template <typename Real>
void check_finite(const Tensor<Real>& t, const char* op) {
  if (!t.all_finite())
    throw std::runtime_error(strcat_("non-finite value produced by op '", op, "'"));
}

}  // namespace

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::push(
    Tensor<Real> value, bool requires_grad, std::function<void(ParamGraph&)> fn) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward_fn = std::move(fn);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

template <typename Real>
Tensor<Real>& ParamGraph<Real>::grad_buf(NodeId id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (n.grad.numel() == 0) n.grad = Tensor<Real>(n.value.shape());
  return n.grad;
}

template <typename Real>
const Tensor<Real>& ParamGraph<Real>::grad(NodeId id) const {
  const Node& n = nodes_[static_cast<size_t>(id)];
  require(n.grad.numel() > 0, "grad: node has no gradient (run backward first)");
  return n.grad;
}

template <typename Real>
void ParamGraph<Real>::accumulate(NodeId id, const Tensor<Real>& g) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (!n.requires_grad) return;
  Tensor<Real>& buf = grad_buf(id);
  const Real* src = g.data();
  Real* dst = buf.data();
  int64_t m = buf.numel();
  for (int64_t i = 0; i < m; ++i) dst[i] += src[i];
}

template <typename Real>
Real ParamGraph<Real>::scalar_value(NodeId id) const {
  const Tensor<Real>& v = value(id);
  require(v.numel() == 1, "scalar_value: node is not a scalar");
  return v[0];
}

template <typename Real>
void ParamGraph<Real>::reset() {
  nodes_.clear();
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::constant(Tensor<Real> value) {
  return push(std::move(value), false, nullptr);
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::param(const Tensor<Real>& value,
                                                          Tensor<Real>* grad_sink) {
  require(grad_sink != nullptr, "param: null gradient sink");
  require(grad_sink->same_shape(value), "param: sink shape mismatch");
  Tensor<Real> copy = value;
  NodeId id = push(std::move(copy), true, nullptr);
  nodes_[static_cast<size_t>(id)].sink = grad_sink;
  nodes_[static_cast<size_t>(id)].backward_fn = [id](ParamGraph& g) {
    Node& n = g.nodes_[static_cast<size_t>(id)];
    const Real* src = n.grad.data();
    Real* dst = n.sink->data();
    int64_t m = n.grad.numel();
    for (int64_t i = 0; i < m; ++i) dst[i] += src[i];
  };
  return id;
}

template <typename Real>
void ParamGraph<Real>::backward(NodeId loss) {
  Node& ln = nodes_[static_cast<size_t>(loss)];
  require(ln.value.numel() == 1, "backward: loss must be scalar");
  require(ln.requires_grad, "backward: loss does not depend on any parameter");
  grad_buf(loss)[0] = Real(1);
  for (NodeId id = loss; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.requires_grad || n.grad.numel() == 0 || !n.backward_fn) continue;
    n.backward_fn(*this);
  }
  for (const Node& n : nodes_) {
    if (n.sink != nullptr && n.grad.numel() > 0 && !n.grad.all_finite())
      throw std::runtime_error("backward: non-finite parameter gradient");
  }
}

// ---------------------------------------------------------------------------
// Elementwise ops.

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::add(NodeId a, NodeId b) {
  const Tensor<Real>& va = value(a);
  const Tensor<Real>& vb = value(b);
  require(va.same_shape(vb), "add: shape mismatch");
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) y[i] = va[i] + vb[i];
  check_finite(y, "add");
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a, b](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      g.accumulate(a, go);
      g.accumulate(b, go);
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::sub(NodeId a, NodeId b) {
  const Tensor<Real>& va = value(a);
  const Tensor<Real>& vb = value(b);
  require(va.same_shape(vb), "sub: shape mismatch");
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) y[i] = va[i] - vb[i];
  check_finite(y, "sub");
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a, b](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      g.accumulate(a, go);
      if (g.requires_grad(b)) {
        Tensor<Real>& gb = g.grad_buf(b);
        for (int64_t i = 0; i < go.numel(); ++i) gb[i] -= go[i];
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::mul(NodeId a, NodeId b) {
  const Tensor<Real>& va = value(a);
  const Tensor<Real>& vb = value(b);
  require(va.same_shape(vb), "mul: shape mismatch");
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) y[i] = va[i] * vb[i];
  check_finite(y, "mul");
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a, b](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& va = g.value(a);
      const Tensor<Real>& vb = g.value(b);
      if (g.requires_grad(a)) {
        Tensor<Real>& ga = g.grad_buf(a);
        for (int64_t i = 0; i < go.numel(); ++i) ga[i] += go[i] * vb[i];
      }
      if (g.requires_grad(b)) {
        Tensor<Real>& gb = g.grad_buf(b);
        for (int64_t i = 0; i < go.numel(); ++i) gb[i] += go[i] * va[i];
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::add_scalar(NodeId a, Real c) {
  const Tensor<Real>& va = value(a);
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) y[i] = va[i] + c;
  check_finite(y, "add_scalar");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a](ParamGraph& g) {
      g.accumulate(a, g.nodes_[static_cast<size_t>(out)].grad);
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::mul_scalar(NodeId a, Real c) {
  const Tensor<Real>& va = value(a);
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) y[i] = va[i] * c;
  check_finite(y, "mul_scalar");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a, c](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < go.numel(); ++i) ga[i] += go[i] * c;
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::exp_(NodeId a) {
  const Tensor<Real>& va = value(a);
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) y[i] = std::exp(va[i]);
  check_finite(y, "exp");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vy = g.value(out);
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < go.numel(); ++i) ga[i] += go[i] * vy[i];
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::reciprocal(NodeId a, Real eps) {
  const Tensor<Real>& va = value(a);
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) y[i] = Real(1) / (va[i] + eps);
  check_finite(y, "reciprocal");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vy = g.value(out);
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < go.numel(); ++i) ga[i] -= go[i] * vy[i] * vy[i];
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::abs_(NodeId a) {
  const Tensor<Real>& va = value(a);
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) y[i] = std::abs(va[i]);
  check_finite(y, "abs");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& va = g.value(a);
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < go.numel(); ++i) {
        Real s = va[i] > Real(0) ? Real(1) : (va[i] < Real(0) ? Real(-1) : Real(0));
        ga[i] += go[i] * s;
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::leaky_relu(NodeId a, Real slope) {
  const Tensor<Real>& va = value(a);
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i)
    y[i] = va[i] > Real(0) ? va[i] : slope * va[i];
  check_finite(y, "leaky_relu");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a, slope](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& va = g.value(a);
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < go.numel(); ++i)
        ga[i] += go[i] * (va[i] > Real(0) ? Real(1) : slope);
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::sigmoid_(NodeId a) {
  const Tensor<Real>& va = value(a);
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) {
    Real x = va[i];
    y[i] = x >= Real(0) ? Real(1) / (Real(1) + std::exp(-x))
                        : std::exp(x) / (Real(1) + std::exp(x));
  }
  check_finite(y, "sigmoid");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vy = g.value(out);
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < go.numel(); ++i)
        ga[i] += go[i] * vy[i] * (Real(1) - vy[i]);
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::log_sigmoid_(NodeId a) {
  const Tensor<Real>& va = value(a);
  Tensor<Real> y(va.shape());
  for (int64_t i = 0; i < y.numel(); ++i) {
    Real x = va[i];
    y[i] = x >= Real(0) ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
  }
  check_finite(y, "log_sigmoid");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& va = g.value(a);
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < go.numel(); ++i) {
        Real x = -va[i];  // d/dx log sigmoid(x) = sigmoid(-x)
        Real s = x >= Real(0) ? Real(1) / (Real(1) + std::exp(-x))
                              : std::exp(x) / (Real(1) + std::exp(x));
        ga[i] += go[i] * s;
      }
    };
  }
  return out;
}

// Multiplicative angular margin psi_m(theta) applied to cosine values:
// psi = (-1)^k cos(m theta) - 2k on theta in [k pi/m, (k+1) pi/m].
// Continuous and monotone decreasing in theta; psi_1 == cos.
template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::psi_margin(NodeId cosine, int margin) {
  require(margin >= 1, "psi_margin: margin must be >= 1");
  const Tensor<Real>& vc = value(cosine);
  Tensor<Real> y(vc.shape());
  const Real lim = Real(1) - Real(1e-7);
  for (int64_t i = 0; i < y.numel(); ++i) {
    Real c = std::clamp(vc[i], -lim, lim);
    double theta = std::acos(static_cast<double>(c));
    int k = std::min(margin - 1, static_cast<int>(std::floor(margin * theta / M_PI)));
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    y[i] = static_cast<Real>(sign * std::cos(margin * theta) - 2.0 * k);
  }
  check_finite(y, "psi_margin");
  bool rg = requires_grad(cosine);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, cosine, margin, lim](ParamGraph& g) {
      if (!g.requires_grad(cosine)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vc = g.value(cosine);
      Tensor<Real>& gc = g.grad_buf(cosine);
      for (int64_t i = 0; i < go.numel(); ++i) {
        Real c = std::clamp(vc[i], -lim, lim);
        double theta = std::acos(static_cast<double>(c));
        int k = std::min(margin - 1, static_cast<int>(std::floor(margin * theta / M_PI)));
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        double st = std::max(std::sin(theta), 1e-6);
        double d = sign * margin * std::sin(margin * theta) / st;
        gc[i] += go[i] * static_cast<Real>(d);
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shape ops.

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::reshape(NodeId a,
                                                            std::vector<int64_t> shape) {
  const Tensor<Real>& va = value(a);
  require(Tensor<Real>::numel_of(shape) == va.numel(), "reshape: element count mismatch");
  Tensor<Real> y(shape);
  std::copy(va.data(), va.data() + va.numel(), y.data());
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < go.numel(); ++i) ga[i] += go[i];
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::transpose2d(NodeId a) {
  const Tensor<Real>& va = value(a);
  require(va.rank() == 2, "transpose2d: rank-2 tensor required");
  int64_t m = va.dim(0), n = va.dim(1);
  Tensor<Real> y({n, m});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) y.at(j, i) = va.at(i, j);
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a, m, n](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) ga.at(i, j) += go.at(j, i);
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::concat_vec(NodeId a, NodeId b) {
  const Tensor<Real>& va = value(a);
  const Tensor<Real>& vb = value(b);
  require(va.rank() == 1 && vb.rank() == 1, "concat_vec: rank-1 tensors required");
  int64_t m = va.numel(), n = vb.numel();
  Tensor<Real> y({m + n});
  std::copy(va.data(), va.data() + m, y.data());
  std::copy(vb.data(), vb.data() + n, y.data() + m);
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a, b, m, n](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      if (g.requires_grad(a)) {
        Tensor<Real>& ga = g.grad_buf(a);
        for (int64_t i = 0; i < m; ++i) ga[i] += go[i];
      }
      if (g.requires_grad(b)) {
        Tensor<Real>& gb = g.grad_buf(b);
        for (int64_t i = 0; i < n; ++i) gb[i] += go[m + i];
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// 2-D linear algebra.

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::matmul(NodeId a, NodeId b) {
  const Tensor<Real>& va = value(a);
  const Tensor<Real>& vb = value(b);
  require(va.rank() == 2 && vb.rank() == 2, "matmul: rank-2 tensors required");
  require(va.dim(1) == vb.dim(0), "matmul: inner dimension mismatch");
  int64_t m = va.dim(0), k = va.dim(1), n = vb.dim(1);
  Tensor<Real> y({m, n});
  for (int64_t i = 0; i < m; ++i) {
    Real* yrow = y.data() + i * n;
    const Real* arow = va.data() + i * k;
    for (int64_t p = 0; p < k; ++p) {
      Real av = arow[p];
      const Real* brow = vb.data() + p * n;
      for (int64_t j = 0; j < n; ++j) yrow[j] += av * brow[j];
    }
  }
  check_finite(y, "matmul");
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a, b, m, k, n](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& va = g.value(a);
      const Tensor<Real>& vb = g.value(b);
      if (g.requires_grad(a)) {
        // gA = G * B^T
        Tensor<Real>& ga = g.grad_buf(a);
        for (int64_t i = 0; i < m; ++i) {
          const Real* grow = go.data() + i * n;
          Real* garow = ga.data() + i * k;
          for (int64_t p = 0; p < k; ++p) {
            const Real* brow = vb.data() + p * n;
            Real s = 0;
            for (int64_t j = 0; j < n; ++j) s += grow[j] * brow[j];
            garow[p] += s;
          }
        }
      }
      if (g.requires_grad(b)) {
        // gB = A^T * G
        Tensor<Real>& gb = g.grad_buf(b);
        for (int64_t i = 0; i < m; ++i) {
          const Real* arow = va.data() + i * k;
          const Real* grow = go.data() + i * n;
          for (int64_t p = 0; p < k; ++p) {
            Real av = arow[p];
            Real* gbrow = gb.data() + p * n;
            for (int64_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
          }
        }
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::add_row_broadcast(NodeId x, NodeId v) {
  const Tensor<Real>& vx = value(x);
  const Tensor<Real>& vv = value(v);
  require(vx.rank() == 2 && vv.rank() == 1 && vv.numel() == vx.dim(1),
          "add_row_broadcast: shapes must be [m,n] and [n]");
  int64_t m = vx.dim(0), n = vx.dim(1);
  Tensor<Real> y({m, n});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) y.at(i, j) = vx.at(i, j) + vv[j];
  check_finite(y, "add_row_broadcast");
  bool rg = requires_grad(x) || requires_grad(v);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, v, m, n](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      g.accumulate(x, go);
      if (g.requires_grad(v)) {
        Tensor<Real>& gv = g.grad_buf(v);
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j) gv[j] += go.at(i, j);
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::add_col_broadcast(NodeId x, NodeId u) {
  const Tensor<Real>& vx = value(x);
  const Tensor<Real>& vu = value(u);
  require(vx.rank() == 2 && vu.rank() == 1 && vu.numel() == vx.dim(0),
          "add_col_broadcast: shapes must be [m,n] and [m]");
  int64_t m = vx.dim(0), n = vx.dim(1);
  Tensor<Real> y({m, n});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) y.at(i, j) = vx.at(i, j) + vu[i];
  check_finite(y, "add_col_broadcast");
  bool rg = requires_grad(x) || requires_grad(u);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, u, m, n](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      g.accumulate(x, go);
      if (g.requires_grad(u)) {
        Tensor<Real>& gu = g.grad_buf(u);
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j) gu[i] += go.at(i, j);
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::mul_row_broadcast(NodeId x, NodeId v) {
  const Tensor<Real>& vx = value(x);
  const Tensor<Real>& vv = value(v);
  require(vx.rank() == 2 && vv.rank() == 1 && vv.numel() == vx.dim(1),
          "mul_row_broadcast: shapes must be [m,n] and [n]");
  int64_t m = vx.dim(0), n = vx.dim(1);
  Tensor<Real> y({m, n});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) y.at(i, j) = vx.at(i, j) * vv[j];
  check_finite(y, "mul_row_broadcast");
  bool rg = requires_grad(x) || requires_grad(v);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, v, m, n](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vx = g.value(x);
      const Tensor<Real>& vv = g.value(v);
      if (g.requires_grad(x)) {
        Tensor<Real>& gx = g.grad_buf(x);
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j) gx.at(i, j) += go.at(i, j) * vv[j];
      }
      if (g.requires_grad(v)) {
        Tensor<Real>& gv = g.grad_buf(v);
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j) gv[j] += go.at(i, j) * vx.at(i, j);
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::mul_col_broadcast(NodeId x, NodeId u) {
  const Tensor<Real>& vx = value(x);
  const Tensor<Real>& vu = value(u);
  require(vx.rank() == 2 && vu.rank() == 1 && vu.numel() == vx.dim(0),
          "mul_col_broadcast: shapes must be [m,n] and [m]");
  int64_t m = vx.dim(0), n = vx.dim(1);
  Tensor<Real> y({m, n});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) y.at(i, j) = vx.at(i, j) * vu[i];
  check_finite(y, "mul_col_broadcast");
  bool rg = requires_grad(x) || requires_grad(u);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, u, m, n](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vx = g.value(x);
      const Tensor<Real>& vu = g.value(u);
      if (g.requires_grad(x)) {
        Tensor<Real>& gx = g.grad_buf(x);
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j) gx.at(i, j) += go.at(i, j) * vu[i];
      }
      if (g.requires_grad(u)) {
        Tensor<Real>& gu = g.grad_buf(u);
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j) gu[i] += go.at(i, j) * vx.at(i, j);
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::row_sums(NodeId x) {
  const Tensor<Real>& vx = value(x);
  require(vx.rank() == 2, "row_sums: rank-2 tensor required");
  int64_t m = vx.dim(0), n = vx.dim(1);
  Tensor<Real> y({m});
  for (int64_t i = 0; i < m; ++i) {
    Real s = 0;
    for (int64_t j = 0; j < n; ++j) s += vx.at(i, j);
    y[i] = s;
  }
  check_finite(y, "row_sums");
  bool rg = requires_grad(x);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, m, n](ParamGraph& g) {
      if (!g.requires_grad(x)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      Tensor<Real>& gx = g.grad_buf(x);
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) gx.at(i, j) += go[i];
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::col_sums(NodeId x) {
  const Tensor<Real>& vx = value(x);
  require(vx.rank() == 2, "col_sums: rank-2 tensor required");
  int64_t m = vx.dim(0), n = vx.dim(1);
  Tensor<Real> y({n});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) y[j] += vx.at(i, j);
  check_finite(y, "col_sums");
  bool rg = requires_grad(x);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, m, n](ParamGraph& g) {
      if (!g.requires_grad(x)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      Tensor<Real>& gx = g.grad_buf(x);
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) gx.at(i, j) += go[j];
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::softmax_rows(NodeId x) {
  const Tensor<Real>& vx = value(x);
  require(vx.rank() == 2, "softmax_rows: rank-2 tensor required");
  int64_t m = vx.dim(0), n = vx.dim(1);
  Tensor<Real> y({m, n});
  for (int64_t i = 0; i < m; ++i) {
    Real mx = vx.at(i, 0);
    for (int64_t j = 1; j < n; ++j) mx = std::max(mx, vx.at(i, j));
    Real z = 0;
    for (int64_t j = 0; j < n; ++j) {
      Real e = std::exp(vx.at(i, j) - mx);
      y.at(i, j) = e;
      z += e;
    }
    for (int64_t j = 0; j < n; ++j) y.at(i, j) /= z;
  }
  check_finite(y, "softmax_rows");
  bool rg = requires_grad(x);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, m, n](ParamGraph& g) {
      if (!g.requires_grad(x)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vy = g.value(out);
      Tensor<Real>& gx = g.grad_buf(x);
      for (int64_t i = 0; i < m; ++i) {
        Real dot = 0;
        for (int64_t j = 0; j < n; ++j) dot += go.at(i, j) * vy.at(i, j);
        for (int64_t j = 0; j < n; ++j)
          gx.at(i, j) += vy.at(i, j) * (go.at(i, j) - dot);
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::l2_normalize_rows(NodeId x) {
  const Tensor<Real>& vx = value(x);
  require(vx.rank() == 1 || vx.rank() == 2, "l2_normalize_rows: rank-1 or -2 required");
  int64_t m = vx.rank() == 2 ? vx.dim(0) : 1;
  int64_t n = vx.rank() == 2 ? vx.dim(1) : vx.numel();
  const Real eps = Real(1e-12);
  Tensor<Real> y(vx.shape());
  std::vector<Real> norms(static_cast<size_t>(m));
  for (int64_t i = 0; i < m; ++i) {
    const Real* row = vx.data() + i * n;
    Real s = 0;
    for (int64_t j = 0; j < n; ++j) s += row[j] * row[j];
    Real r = std::sqrt(s + eps);
    norms[static_cast<size_t>(i)] = r;
    Real* yrow = y.data() + i * n;
    for (int64_t j = 0; j < n; ++j) yrow[j] = row[j] / r;
  }
  check_finite(y, "l2_normalize_rows");
  bool rg = requires_grad(x);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, m, n, norms](ParamGraph& g) {
      if (!g.requires_grad(x)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vy = g.value(out);
      Tensor<Real>& gx = g.grad_buf(x);
      for (int64_t i = 0; i < m; ++i) {
        const Real* grow = go.data() + i * n;
        const Real* yrow = vy.data() + i * n;
        Real* gxrow = gx.data() + i * n;
        Real dot = 0;
        for (int64_t j = 0; j < n; ++j) dot += grow[j] * yrow[j];
        Real r = norms[static_cast<size_t>(i)];
        for (int64_t j = 0; j < n; ++j)
          gxrow[j] += (grow[j] - yrow[j] * dot) / r;
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Network building blocks.

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::conv1d(NodeId x, NodeId w, int dilation) {
  const Tensor<Real>& vx = value(x);
  const Tensor<Real>& vw = value(w);
  require(vx.rank() == 2 && vw.rank() == 3, "conv1d: x must be [C,T], w must be [Co,Ci,K]");
  require(vw.dim(1) == vx.dim(0), "conv1d: channel mismatch");
  require(vw.dim(2) % 2 == 1, "conv1d: kernel size must be odd");
  require(dilation >= 1, "conv1d: dilation must be >= 1");
  int64_t ci = vx.dim(0), t_len = vx.dim(1);
  int64_t co = vw.dim(0), k = vw.dim(2);
  int64_t ctr = (k - 1) / 2;
  Tensor<Real> y({co, t_len});
  // Cross-correlation with zero padding: y[o,t] = sum_{c,q} w[o,c,q] x[c, t+(q-ctr)*d].
  for (int64_t o = 0; o < co; ++o) {
    Real* yrow = y.data() + o * t_len;
    for (int64_t c = 0; c < ci; ++c) {
      const Real* xrow = vx.data() + c * t_len;
      const Real* wrow = vw.data() + (o * ci + c) * k;
      for (int64_t q = 0; q < k; ++q) {
        int64_t off = (q - ctr) * dilation;
        Real wv = wrow[q];
        if (wv == Real(0)) continue;
        int64_t lo = std::max<int64_t>(0, -off);
        int64_t hi = std::min<int64_t>(t_len, t_len - off);
        const Real* xp = xrow + off;
        for (int64_t t = lo; t < hi; ++t) yrow[t] += wv * xp[t];
      }
    }
  }
  check_finite(y, "conv1d");
  bool rg = requires_grad(x) || requires_grad(w);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, w, dilation](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vx = g.value(x);
      const Tensor<Real>& vw = g.value(w);
      int64_t ci = vx.dim(0), t_len = vx.dim(1);
      int64_t co = vw.dim(0), k = vw.dim(2);
      int64_t ctr = (k - 1) / 2;
      if (g.requires_grad(x)) {
        Tensor<Real>& gx = g.grad_buf(x);
        for (int64_t o = 0; o < co; ++o) {
          const Real* grow = go.data() + o * t_len;
          for (int64_t c = 0; c < ci; ++c) {
            Real* gxrow = gx.data() + c * t_len;
            const Real* wrow = vw.data() + (o * ci + c) * k;
            for (int64_t q = 0; q < k; ++q) {
              int64_t off = (q - ctr) * dilation;
              Real wv = wrow[q];
              if (wv == Real(0)) continue;
              // gx[c, t+off] += w * go[o, t]
              int64_t lo = std::max<int64_t>(0, -off);
              int64_t hi = std::min<int64_t>(t_len, t_len - off);
              Real* gxp = gxrow + off;
              for (int64_t t = lo; t < hi; ++t) gxp[t] += wv * grow[t];
            }
          }
        }
      }
      if (g.requires_grad(w)) {
        Tensor<Real>& gw = g.grad_buf(w);
        for (int64_t o = 0; o < co; ++o) {
          const Real* grow = go.data() + o * t_len;
          for (int64_t c = 0; c < ci; ++c) {
            const Real* xrow = vx.data() + c * t_len;
            Real* gwrow = gw.data() + (o * ci + c) * k;
            for (int64_t q = 0; q < k; ++q) {
              int64_t off = (q - ctr) * dilation;
              int64_t lo = std::max<int64_t>(0, -off);
              int64_t hi = std::min<int64_t>(t_len, t_len - off);
              const Real* xp = xrow + off;
              Real s = 0;
              for (int64_t t = lo; t < hi; ++t) s += grow[t] * xp[t];
              gwrow[q] += s;
            }
          }
        }
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::conv2d(NodeId x, NodeId w,
                                                           int stride_f, int stride_t) {
  const Tensor<Real>& vx = value(x);
  const Tensor<Real>& vw = value(w);
  require(vx.rank() == 3, "conv2d: x must be [C,F,T]");
  require(vw.rank() == 4, "conv2d: w must be [Co,Ci,KF,KT]");
  require(vw.dim(1) == vx.dim(0), "conv2d: channel mismatch");
  require(vw.dim(2) % 2 == 1 && vw.dim(3) % 2 == 1, "conv2d: kernel sizes must be odd");
  require(stride_f >= 1 && stride_t >= 1, "conv2d: strides must be >= 1");
  int64_t ci = vx.dim(0), f_len = vx.dim(1), t_len = vx.dim(2);
  int64_t co = vw.dim(0), kf = vw.dim(2), kt = vw.dim(3);
  int64_t pf = (kf - 1) / 2, pt = (kt - 1) / 2;
  int64_t fo_len = (f_len + stride_f - 1) / stride_f;
  int64_t to_len = (t_len + stride_t - 1) / stride_t;
  Tensor<Real> y({co, fo_len, to_len});
  for (int64_t o = 0; o < co; ++o) {
    for (int64_t c = 0; c < ci; ++c) {
      const Real* wbase = vw.data() + ((o * ci + c) * kf) * kt;
      for (int64_t qf = 0; qf < kf; ++qf) {
        for (int64_t qt = 0; qt < kt; ++qt) {
          Real wv = wbase[qf * kt + qt];
          if (wv == Real(0)) continue;
          for (int64_t fo = 0; fo < fo_len; ++fo) {
            int64_t fi = fo * stride_f + qf - pf;
            if (fi < 0 || fi >= f_len) continue;
            const Real* xrow = vx.data() + (c * f_len + fi) * t_len;
            Real* yrow = y.data() + (o * fo_len + fo) * to_len;
            for (int64_t to = 0; to < to_len; ++to) {
              int64_t ti = to * stride_t + qt - pt;
              if (ti < 0 || ti >= t_len) continue;
              yrow[to] += wv * xrow[ti];
            }
          }
        }
      }
    }
  }
  check_finite(y, "conv2d");
  bool rg = requires_grad(x) || requires_grad(w);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, w, stride_f, stride_t](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vx = g.value(x);
      const Tensor<Real>& vw = g.value(w);
      int64_t ci = vx.dim(0), f_len = vx.dim(1), t_len = vx.dim(2);
      int64_t co = vw.dim(0), kf = vw.dim(2), kt = vw.dim(3);
      int64_t pf = (kf - 1) / 2, pt = (kt - 1) / 2;
      int64_t fo_len = go.dim(1), to_len = go.dim(2);
      bool need_x = g.requires_grad(x), need_w = g.requires_grad(w);
      Tensor<Real>* gx = need_x ? &g.grad_buf(x) : nullptr;
      Tensor<Real>* gw = need_w ? &g.grad_buf(w) : nullptr;
      for (int64_t o = 0; o < co; ++o) {
        for (int64_t c = 0; c < ci; ++c) {
          const Real* wbase = vw.data() + ((o * ci + c) * kf) * kt;
          Real* gwbase = need_w ? gw->data() + ((o * ci + c) * kf) * kt : nullptr;
          for (int64_t qf = 0; qf < kf; ++qf) {
            for (int64_t qt = 0; qt < kt; ++qt) {
              Real wv = wbase[qf * kt + qt];
              Real acc = 0;
              for (int64_t fo = 0; fo < fo_len; ++fo) {
                int64_t fi = fo * stride_f + qf - pf;
                if (fi < 0 || fi >= f_len) continue;
                const Real* grow = go.data() + (o * fo_len + fo) * to_len;
                const Real* xrow = vx.data() + (c * f_len + fi) * t_len;
                Real* gxrow = need_x ? gx->data() + (c * f_len + fi) * t_len : nullptr;
                for (int64_t to = 0; to < to_len; ++to) {
                  int64_t ti = to * stride_t + qt - pt;
                  if (ti < 0 || ti >= t_len) continue;
                  if (need_x) gxrow[ti] += wv * grow[to];
                  if (need_w) acc += grow[to] * xrow[ti];
                }
              }
              if (need_w) gwbase[qf * kt + qt] += acc;
            }
          }
        }
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::add_channel_bias(NodeId x, NodeId b) {
  const Tensor<Real>& vx = value(x);
  const Tensor<Real>& vb = value(b);
  require(vx.rank() >= 1 && vb.rank() == 1 && vb.numel() == vx.dim(0),
          "add_channel_bias: bias length must match leading extent");
  int64_t c_len = vx.dim(0);
  int64_t inner = vx.numel() / c_len;
  Tensor<Real> y(vx.shape());
  for (int64_t c = 0; c < c_len; ++c) {
    const Real* xrow = vx.data() + c * inner;
    Real* yrow = y.data() + c * inner;
    Real bv = vb[c];
    for (int64_t i = 0; i < inner; ++i) yrow[i] = xrow[i] + bv;
  }
  check_finite(y, "add_channel_bias");
  bool rg = requires_grad(x) || requires_grad(b);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, b, c_len, inner](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      g.accumulate(x, go);
      if (g.requires_grad(b)) {
        Tensor<Real>& gb = g.grad_buf(b);
        for (int64_t c = 0; c < c_len; ++c) {
          const Real* grow = go.data() + c * inner;
          Real s = 0;
          for (int64_t i = 0; i < inner; ++i) s += grow[i];
          gb[c] += s;
        }
      }
    };
  }
  return out;
}

// Per-channel normalization over all trailing dims, with learned affine.
// Statistics always come from the tensor being normalized, so inference on
// an utterance recomputes them from that utterance (the "adaptive" part).
template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::bn_adaptive(NodeId x, NodeId gamma,
                                                                NodeId beta, Real var_floor) {
  const Tensor<Real>& vx = value(x);
  const Tensor<Real>& vg = value(gamma);
  const Tensor<Real>& vb = value(beta);
  require(vx.rank() >= 2, "bn_adaptive: need at least [C,T]");
  require(vg.rank() == 1 && vb.rank() == 1 && vg.numel() == vx.dim(0) &&
              vb.numel() == vx.dim(0),
          "bn_adaptive: affine params must be [C]");
  int64_t c_len = vx.dim(0);
  int64_t inner = vx.numel() / c_len;
  require(inner >= 1, "bn_adaptive: empty channel");
  Tensor<Real> y(vx.shape());
  std::vector<Real> mean(static_cast<size_t>(c_len)), istd(static_cast<size_t>(c_len));
  std::vector<char> floored(static_cast<size_t>(c_len));
  for (int64_t c = 0; c < c_len; ++c) {
    const Real* xrow = vx.data() + c * inner;
    Real mu = 0;
    for (int64_t i = 0; i < inner; ++i) mu += xrow[i];
    mu /= static_cast<Real>(inner);
    Real var = 0;
    for (int64_t i = 0; i < inner; ++i) {
      Real d = xrow[i] - mu;
      var += d * d;
    }
    var /= static_cast<Real>(inner);
    bool fl = var < var_floor;
    Real s = std::sqrt(fl ? var_floor : var);
    mean[static_cast<size_t>(c)] = mu;
    istd[static_cast<size_t>(c)] = Real(1) / s;
    floored[static_cast<size_t>(c)] = fl ? 1 : 0;
    Real* yrow = y.data() + c * inner;
    Real gain = vg[c] / s;
    Real shift = vb[c];
    for (int64_t i = 0; i < inner; ++i) yrow[i] = (xrow[i] - mu) * gain + shift;
  }
  check_finite(y, "bn_adaptive");
  bool rg = requires_grad(x) || requires_grad(gamma) || requires_grad(beta);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, gamma, beta, c_len, inner, mean,
                                                    istd, floored](ParamGraph& g) {
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vx = g.value(x);
      const Tensor<Real>& vg = g.value(gamma);
      for (int64_t c = 0; c < c_len; ++c) {
        const Real* grow = go.data() + c * inner;
        const Real* xrow = vx.data() + c * inner;
        Real mu = mean[static_cast<size_t>(c)];
        Real is = istd[static_cast<size_t>(c)];
        Real gsum = 0, gxhat = 0;
        for (int64_t i = 0; i < inner; ++i) {
          gsum += grow[i];
          gxhat += grow[i] * (xrow[i] - mu) * is;
        }
        if (g.requires_grad(beta)) g.grad_buf(beta)[c] += gsum;
        if (g.requires_grad(gamma)) g.grad_buf(gamma)[c] += gxhat;
        if (g.requires_grad(x)) {
          Real* gxrow = g.grad_buf(x).data() + c * inner;
          Real gain = vg[c] * is;
          Real mg = gsum / static_cast<Real>(inner);
          if (floored[static_cast<size_t>(c)]) {
            // Variance is clamped: only the mean path contributes.
            for (int64_t i = 0; i < inner; ++i) gxrow[i] += gain * (grow[i] - mg);
          } else {
            Real mgx = gxhat / static_cast<Real>(inner);
            for (int64_t i = 0; i < inner; ++i) {
              Real xh = (xrow[i] - mu) * is;
              gxrow[i] += gain * (grow[i] - mg - xh * mgx);
            }
          }
        }
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::mean_over_time(NodeId x) {
  const Tensor<Real>& vx = value(x);
  require(vx.rank() == 2, "mean_over_time: [C,T] required");
  int64_t c_len = vx.dim(0), t_len = vx.dim(1);
  Tensor<Real> y({c_len});
  for (int64_t c = 0; c < c_len; ++c) {
    const Real* row = vx.data() + c * t_len;
    Real s = 0;
    for (int64_t t = 0; t < t_len; ++t) s += row[t];
    y[c] = s / static_cast<Real>(t_len);
  }
  check_finite(y, "mean_over_time");
  bool rg = requires_grad(x);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, c_len, t_len](ParamGraph& g) {
      if (!g.requires_grad(x)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      Tensor<Real>& gx = g.grad_buf(x);
      for (int64_t c = 0; c < c_len; ++c) {
        Real gv = go[c] / static_cast<Real>(t_len);
        Real* gxrow = gx.data() + c * t_len;
        for (int64_t t = 0; t < t_len; ++t) gxrow[t] += gv;
      }
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::stats_pool(NodeId x, Real std_floor) {
  const Tensor<Real>& vx = value(x);
  require(vx.rank() == 2, "stats_pool: [C,T] required");
  int64_t c_len = vx.dim(0), t_len = vx.dim(1);
  Tensor<Real> y({2 * c_len});
  std::vector<char> floored(static_cast<size_t>(c_len));
  for (int64_t c = 0; c < c_len; ++c) {
    const Real* row = vx.data() + c * t_len;
    Real mu = 0;
    for (int64_t t = 0; t < t_len; ++t) mu += row[t];
    mu /= static_cast<Real>(t_len);
    Real var = 0;
    for (int64_t t = 0; t < t_len; ++t) {
      Real d = row[t] - mu;
      var += d * d;
    }
    var /= static_cast<Real>(t_len);
    Real sd = std::sqrt(var);
    bool fl = sd < std_floor;
    y[c] = mu;
    y[c_len + c] = fl ? std_floor : sd;
    floored[static_cast<size_t>(c)] = fl ? 1 : 0;
  }
  check_finite(y, "stats_pool");
  bool rg = requires_grad(x);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, c_len, t_len, floored](ParamGraph& g) {
      if (!g.requires_grad(x)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      const Tensor<Real>& vy = g.value(out);
      const Tensor<Real>& vx = g.value(x);
      Tensor<Real>& gx = g.grad_buf(x);
      for (int64_t c = 0; c < c_len; ++c) {
        const Real* xrow = vx.data() + c * t_len;
        Real* gxrow = gx.data() + c * t_len;
        Real gmu = go[c] / static_cast<Real>(t_len);
        Real mu = 0;
        for (int64_t t = 0; t < t_len; ++t) mu += xrow[t];
        mu /= static_cast<Real>(t_len);
        if (!floored[static_cast<size_t>(c)]) {
          Real sd = vy[c_len + c];
          Real gsd = go[c_len + c] / (static_cast<Real>(t_len) * sd);
          for (int64_t t = 0; t < t_len; ++t)
            gxrow[t] += gmu + gsd * (xrow[t] - mu);
        } else {
          for (int64_t t = 0; t < t_len; ++t) gxrow[t] += gmu;
        }
      }
    };
  }
  return out;
}

// Centered moving-mean removal with edge-clipped windows; the transpose of
// the averaging map is applied in backward.
template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::online_mean_norm(NodeId x, int window) {
  const Tensor<Real>& vx = value(x);
  require(vx.rank() == 2, "online_mean_norm: [D,T] required");
  require(window >= 1 && window % 2 == 1, "online_mean_norm: window must be odd and >= 1");
  int64_t d_len = vx.dim(0), t_len = vx.dim(1);
  int64_t half = window / 2;
  Tensor<Real> y({d_len, t_len});
  for (int64_t d = 0; d < d_len; ++d) {
    const Real* row = vx.data() + d * t_len;
    Real* yrow = y.data() + d * t_len;
    std::vector<double> prefix(static_cast<size_t>(t_len) + 1, 0.0);
    for (int64_t t = 0; t < t_len; ++t) prefix[static_cast<size_t>(t) + 1] = prefix[static_cast<size_t>(t)] + row[t];
    for (int64_t t = 0; t < t_len; ++t) {
      int64_t lo = std::max<int64_t>(0, t - half);
      int64_t hi = std::min<int64_t>(t_len - 1, t + half);
      double mean = (prefix[static_cast<size_t>(hi) + 1] - prefix[static_cast<size_t>(lo)]) /
                    static_cast<double>(hi - lo + 1);
      yrow[t] = row[t] - static_cast<Real>(mean);
    }
  }
  check_finite(y, "online_mean_norm");
  bool rg = requires_grad(x);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, x, d_len, t_len, half](ParamGraph& g) {
      if (!g.requires_grad(x)) return;
      const Tensor<Real>& go = g.nodes_[static_cast<size_t>(out)].grad;
      Tensor<Real>& gx = g.grad_buf(x);
      for (int64_t d = 0; d < d_len; ++d) {
        const Real* grow = go.data() + d * t_len;
        Real* gxrow = gx.data() + d * t_len;
        // a[t] = g[t]/w_t; (M^T g)[tau] = sum_{t in [tau-half, tau+half]} a[t].
        std::vector<double> prefix(static_cast<size_t>(t_len) + 1, 0.0);
        for (int64_t t = 0; t < t_len; ++t) {
          int64_t lo = std::max<int64_t>(0, t - half);
          int64_t hi = std::min<int64_t>(t_len - 1, t + half);
          prefix[static_cast<size_t>(t) + 1] =
              prefix[static_cast<size_t>(t)] + grow[t] / static_cast<double>(hi - lo + 1);
        }
        for (int64_t tau = 0; tau < t_len; ++tau) {
          int64_t lo = std::max<int64_t>(0, tau - half);
          int64_t hi = std::min<int64_t>(t_len - 1, tau + half);
          double mt = prefix[static_cast<size_t>(hi) + 1] - prefix[static_cast<size_t>(lo)];
          gxrow[tau] += grow[tau] - static_cast<Real>(mt);
        }
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reductions and losses.

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::sum_all(NodeId a) {
  const Tensor<Real>& va = value(a);
  Real s = 0;
  for (int64_t i = 0; i < va.numel(); ++i) s += va[i];
  Tensor<Real> y = Tensor<Real>::scalar(s);
  check_finite(y, "sum_all");
  bool rg = requires_grad(a);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, a](ParamGraph& g) {
      if (!g.requires_grad(a)) return;
      Real gv = g.nodes_[static_cast<size_t>(out)].grad[0];
      Tensor<Real>& ga = g.grad_buf(a);
      for (int64_t i = 0; i < ga.numel(); ++i) ga[i] += gv;
    };
  }
  return out;
}

template <typename Real>
typename ParamGraph<Real>::NodeId ParamGraph<Real>::cross_entropy_logits(NodeId logits,
                                                                         int label) {
  const Tensor<Real>& vz = value(logits);
  require(vz.rank() == 1, "cross_entropy_logits: rank-1 logits required");
  require(label >= 0 && label < vz.numel(), "cross_entropy_logits: label out of range");
  int64_t n = vz.numel();
  Real mx = vz[0];
  for (int64_t i = 1; i < n; ++i) mx = std::max(mx, vz[i]);
  Real z = 0;
  for (int64_t i = 0; i < n; ++i) z += std::exp(vz[i] - mx);
  Real lse = mx + std::log(z);
  Tensor<Real> y = Tensor<Real>::scalar(lse - vz[label]);
  check_finite(y, "cross_entropy_logits");
  bool rg = requires_grad(logits);
  NodeId out = push(std::move(y), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(out)].backward_fn = [out, logits, label, lse](ParamGraph& g) {
      if (!g.requires_grad(logits)) return;
      Real gv = g.nodes_[static_cast<size_t>(out)].grad[0];
      const Tensor<Real>& vz = g.value(logits);
      Tensor<Real>& gz = g.grad_buf(logits);
      for (int64_t i = 0; i < vz.numel(); ++i) {
        Real p = std::exp(vz[i] - lse);
        gz[i] += gv * (p - (i == label ? Real(1) : Real(0)));
      }
    };
  }
  return out;
}

template class ParamGraph<float>;
template class ParamGraph<double>;

}  // namespace ndgrad
}  // namespace dfls
