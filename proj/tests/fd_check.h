// tests/fd_check.h
//
// Central finite-difference gradient oracle used by the unit and
// acceptance suites. Stays independent of the backward implementation:
// it only re-runs forward passes on perturbed parameters.

#ifndef DFLS_TESTS_FD_CHECK_H_
#define DFLS_TESTS_FD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "ndgrad/graph.h"
#include "ndgrad/param_store.h"

namespace dfls {
namespace testing {

// `build` is a callable (ParamGraph<double>&, ParamStore<double>&) -> NodeId
// returning the scalar loss node. Every parameter scalar is perturbed by
// +-h (optionally a deterministic subsample of at most `max_coords` per
// tensor) and compared against the analytic gradient from one backward.
// Returns the max relative error, rel = |a-f| / max(|a|, |f|, 1e-3).
template <typename Build>
double fd_max_rel_err(ndgrad::ParamStore<double>& params, Build build,
                      double h = 1e-5, int64_t max_coords = -1) {
  using ndgrad::ParamGraph;
  params.zero_grads();
  {
    ParamGraph<double> g;
    auto loss = build(g, params);
    g.backward(loss);
  }
  std::map<std::string, std::vector<double>> analytic;
  for (const auto& name : params.names()) {
    const auto& gt = params.grad(name);
    analytic[name].assign(gt.data(), gt.data() + gt.numel());
  }
  auto eval = [&]() {
    ParamGraph<double> g;
    auto loss = build(g, params);
    return g.scalar_value(loss);
  };
  double max_rel = 0.0;
  for (const auto& name : params.names()) {
    auto& v = params.value(name);
    int64_t n = v.numel();
    int64_t stride = 1;
    if (max_coords > 0 && n > max_coords) stride = (n + max_coords - 1) / max_coords;
    for (int64_t i = 0; i < n; i += stride) {
      double orig = v[i];
      v[i] = orig + h;
      double lp = eval();
      v[i] = orig - h;
      double lm = eval();
      v[i] = orig;
      double fd = (lp - lm) / (2.0 * h);
      double an = analytic[name][static_cast<size_t>(i)];
      double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-3});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace testing
}  // namespace dfls

#endif  // DFLS_TESTS_FD_CHECK_H_
