// ndgrad/graph.h

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

#ifndef DFLS_NDGRAD_GRAPH_H_
#define DFLS_NDGRAD_GRAPH_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ndgrad/tensor.h"

namespace dfls {
namespace ndgrad {

// Reverse-mode tape. Ops execute eagerly (define-by-run), recording a
// backward closure per node; the tape order is the topological order.
// Parameter leaves accumulate their gradients into external sink tensors
// owned by a ParamStore, so one graph can mix trainable and frozen
// networks: frozen parameters enter as constants and receive no gradient.
//
// Every op validates shapes and raises on non-finite outputs; backward
// raises if any parameter gradient comes out non-finite.
template <typename Real>
class ParamGraph {
 public:
  using NodeId = int;

  explicit ParamGraph(uint64_t seed = 0) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  NodeId constant(Tensor<Real> value);
  // `value` is copied into the node; `grad_sink` (same shape) accumulates.
  NodeId param(const Tensor<Real>& value, Tensor<Real>* grad_sink);

  // Elementwise.
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId add_scalar(NodeId a, Real c);
  NodeId mul_scalar(NodeId a, Real c);
  NodeId exp_(NodeId a);
  NodeId reciprocal(NodeId a, Real eps = Real(0));
  NodeId abs_(NodeId a);
  NodeId leaky_relu(NodeId a, Real slope);
  NodeId relu(NodeId a) { return leaky_relu(a, Real(0)); }
  NodeId sigmoid_(NodeId a);
  NodeId log_sigmoid_(NodeId a);
  NodeId psi_margin(NodeId cosine, int margin);

  // Shape.
  NodeId reshape(NodeId a, std::vector<int64_t> shape);
  NodeId transpose2d(NodeId a);
  NodeId concat_vec(NodeId a, NodeId b);

  // Linear algebra on 2-D tensors.
  NodeId matmul(NodeId a, NodeId b);
  NodeId add_row_broadcast(NodeId x, NodeId v);  // x[m,n] + v[n] per row
  NodeId add_col_broadcast(NodeId x, NodeId u);  // x[m,n] + u[m] per column
  NodeId mul_row_broadcast(NodeId x, NodeId v);
  NodeId mul_col_broadcast(NodeId x, NodeId u);
  NodeId row_sums(NodeId x);  // [m,n] -> [m]
  NodeId col_sums(NodeId x);  // [m,n] -> [n]
  NodeId softmax_rows(NodeId x);
  NodeId l2_normalize_rows(NodeId x);  // rank-1 input treated as one row

  // Network building blocks.
  NodeId conv1d(NodeId x, NodeId w, int dilation);  // x[Ci,T], w[Co,Ci,K] odd K
  NodeId conv2d(NodeId x, NodeId w, int stride_f, int stride_t);
  NodeId add_channel_bias(NodeId x, NodeId b);  // b[C] over trailing dims
  NodeId bn_adaptive(NodeId x, NodeId gamma, NodeId beta,
                     Real var_floor = Real(1e-5));
  NodeId mean_over_time(NodeId x);                       // [C,T] -> [C]
  NodeId stats_pool(NodeId x, Real std_floor = Real(1e-5));  // [C,T] -> [2C]
  NodeId online_mean_norm(NodeId x, int window);         // [D,T], centered

  // Reductions and losses.
  NodeId sum_all(NodeId a);
  NodeId cross_entropy_logits(NodeId logits, int label);

  const Tensor<Real>& value(NodeId id) const { return nodes_[static_cast<size_t>(id)].value; }
  Real scalar_value(NodeId id) const;
  bool requires_grad(NodeId id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }
  const Tensor<Real>& grad(NodeId id) const;  // zeros if never touched

  void backward(NodeId loss);
  void reset();
  size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<Real> value;
    Tensor<Real> grad;  // empty until first accumulation
    bool requires_grad = false;
    std::function<void(ParamGraph&)> backward_fn;
    Tensor<Real>* sink = nullptr;
  };

  NodeId push(Tensor<Real> value, bool requires_grad,
              std::function<void(ParamGraph&)> fn);
  Tensor<Real>& grad_buf(NodeId id);
  bool has_grad(NodeId id) const {
    return nodes_[static_cast<size_t>(id)].grad.numel() > 0;
  }
  // Accumulation guarded by requires_grad of the target.
  void accumulate(NodeId id, const Tensor<Real>& g);

  std::vector<Node> nodes_;
  uint64_t seed_ = 0;
};

}  // namespace ndgrad
}  // namespace dfls

#endif  // DFLS_NDGRAD_GRAPH_H_
