// tests/test_ndgrad.cc

#include <doctest.h>

#include <cmath>

#include "fd_check.h"
#include "ndgrad/checkpoint.h"
#include "ndgrad/graph.h"
#include "ndgrad/optim.h"
#include "ndgrad/param_store.h"
#include "util/rng.h"

using namespace dfls;
using namespace dfls::ndgrad;
using dfls::testing::fd_max_rel_err;

namespace {

Tensor<double> random_tensor(std::vector<int64_t> shape, uint64_t seed,
                             double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(std::move(shape));
  Rng rng(seed);
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Direct-summation oracle for dilated cross-correlation, independent of the
// graph implementation.
Tensor<double> conv1d_oracle(const Tensor<double>& x, const Tensor<double>& w,
                             int dilation) {
  int64_t ci = x.dim(0), t_len = x.dim(1), co = w.dim(0), k = w.dim(2);
  int64_t ctr = (k - 1) / 2;
  Tensor<double> y({co, t_len});
  for (int64_t o = 0; o < co; ++o)
    for (int64_t t = 0; t < t_len; ++t) {
      double s = 0;
      for (int64_t c = 0; c < ci; ++c)
        for (int64_t q = 0; q < k; ++q) {
          int64_t ti = t + (q - ctr) * dilation;
          if (ti >= 0 && ti < t_len) s += w.at(o, c, q) * x.at(c, ti);
        }
      y.at(o, t) = s;
    }
  return y;
}

}  // namespace

TEST_CASE("conv1d matches spec example and direct-summation oracle") {
  ParamGraph<double> g;
  auto x = g.constant(Tensor<double>({1, 5}, {1, 2, 3, 4, 5}));
  auto w = g.constant(Tensor<double>({1, 1, 3}, {1, 0, -1}));
  auto y = g.conv1d(x, w, 2);
  const auto& v = g.value(y);
  std::vector<double> expect = {-3, -4, -4, 2, 3};
  for (int i = 0; i < 5; ++i) CHECK(v[i] == doctest::Approx(expect[i]));

  // Random shapes against the oracle.
  auto xr = random_tensor({3, 17}, 11);
  auto wr = random_tensor({4, 3, 5}, 12);
  for (int dil : {1, 2, 3}) {
    ParamGraph<double> g2;
    auto yr = g2.conv1d(g2.constant(xr), g2.constant(wr), dil);
    auto yo = conv1d_oracle(xr, wr, dil);
    for (int64_t i = 0; i < yo.numel(); ++i)
      CHECK(g2.value(yr)[i] == doctest::Approx(yo[i]).epsilon(1e-12));
  }
}

TEST_CASE("conv1d identity kernel passes input through at any dilation") {
  auto x = random_tensor({2, 9}, 21);
  Tensor<double> w({2, 2, 1});
  w.at(0, 0, 0) = 1;
  w.at(1, 1, 0) = 1;
  for (int dil : {1, 4}) {
    ParamGraph<double> g;
    auto y = g.conv1d(g.constant(x), g.constant(w), dil);
    for (int64_t i = 0; i < x.numel(); ++i) CHECK(g.value(y)[i] == x[i]);
  }
}

TEST_CASE("conv1d all-zero input gives zero output and zero weight grad") {
  ParamStore<double> ps;
  ps.create_kaiming("w", {2, 3, 3}, 9, 5);
  ps.create("x", {3, 8});
  ParamGraph<double> g;
  auto y = g.conv1d(ps.bind(g, "x", true), ps.bind(g, "w", true), 2);
  for (int64_t i = 0; i < g.value(y).numel(); ++i) CHECK(g.value(y)[i] == 0.0);
  auto loss = g.sum_all(g.mul(y, y));
  g.backward(loss);
  for (int64_t i = 0; i < ps.grad("w").numel(); ++i) CHECK(ps.grad("w")[i] == 0.0);
}

TEST_CASE("conv1d rejects even kernels and bad shapes") {
  ParamGraph<double> g;
  auto x = g.constant(random_tensor({2, 6}, 1));
  CHECK_THROWS_AS(g.conv1d(x, g.constant(random_tensor({2, 2, 4}, 2)), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(g.conv1d(x, g.constant(random_tensor({2, 3, 3}, 3)), 1),
                  std::invalid_argument);
}

TEST_CASE("bn_adaptive normalizes per channel") {
  SUBCASE("constant channel maps to zeros") {
    ParamGraph<double> g;
    Tensor<double> x({1, 6});
    x.fill(7.0);
    auto y = g.bn_adaptive(g.constant(x), g.constant(Tensor<double>({1}, {1.0})),
                           g.constant(Tensor<double>({1}, {0.0})));
    for (int64_t i = 0; i < 6; ++i) CHECK(g.value(y)[i] == doctest::Approx(0.0));
  }
  SUBCASE("affine restores target moments on gaussian data") {
    Rng rng(99);
    Tensor<double> x({2, 4000});
    for (int64_t i = 0; i < x.numel(); ++i) x[i] = rng.gauss() * 3.0 + 5.0;
    ParamGraph<double> g;
    auto y = g.bn_adaptive(g.constant(x), g.constant(Tensor<double>({2}, {2.0, 2.0})),
                           g.constant(Tensor<double>({2}, {1.0, 1.0})));
    for (int c = 0; c < 2; ++c) {
      double mu = 0, var = 0;
      for (int64_t t = 0; t < 4000; ++t) mu += g.value(y).at(c, t);
      mu /= 4000;
      for (int64_t t = 0; t < 4000; ++t) {
        double d = g.value(y).at(c, t) - mu;
        var += d * d;
      }
      var /= 4000;
      CHECK(mu == doctest::Approx(1.0).epsilon(0.05));
      CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.05));
    }
  }
}

TEST_CASE("backward: basic analytic derivatives") {
  SUBCASE("d/dx x^2 at 3 is 6") {
    ParamStore<double> ps;
    ps.create("x", {1})[0] = 3.0;
    ParamGraph<double> g;
    auto x = ps.bind(g, "x", true);
    auto loss = g.sum_all(g.mul(x, x));
    g.backward(loss);
    CHECK(ps.grad("x")[0] == doctest::Approx(6.0));
  }
  SUBCASE("d/dx log(sigmoid(x)) at 0 is 0.5") {
    ParamStore<double> ps;
    ps.create("x", {1})[0] = 0.0;
    ParamGraph<double> g;
    auto loss = g.sum_all(g.log_sigmoid_(ps.bind(g, "x", true)));
    g.backward(loss);
    CHECK(ps.grad("x")[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("finite differences: every elementwise and shape op") {
  ParamStore<double> ps;
  ps.create("a", {3, 7});
  ps.value("a") = random_tensor({3, 7}, 101, -2.0, 2.0);
  ps.create("b", {3, 7});
  ps.value("b") = random_tensor({3, 7}, 102, 0.5, 2.0);
  auto weights = random_tensor({3, 7}, 103);

  auto run = [&](auto build) {
    double err = fd_max_rel_err(ps, build);
    CHECK(err < 1e-4);
  };

  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.add(p.bind(g, "a", true), p.bind(g, "b", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.sub(p.bind(g, "a", true), p.bind(g, "b", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    return g.sum_all(g.mul(p.bind(g, "a", true), p.bind(g, "b", true)));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.mul_scalar(g.add_scalar(p.bind(g, "a", true), 0.7), -1.3), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.exp_(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.reciprocal(p.bind(g, "b", true), 1e-3), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.abs_(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.leaky_relu(p.bind(g, "a", true), 0.2), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.sigmoid_(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.log_sigmoid_(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(random_tensor({21}, 104));
    return g.sum_all(g.mul(g.reshape(p.bind(g, "a", true), {21}), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(random_tensor({7, 3}, 105));
    return g.sum_all(g.mul(g.transpose2d(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(random_tensor({3, 3}, 106));
    return g.sum_all(
        g.mul(g.matmul(p.bind(g, "a", true), g.transpose2d(p.bind(g, "b", true))), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(random_tensor({3}, 107));
    return g.sum_all(g.mul(g.row_sums(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(random_tensor({7}, 108));
    return g.sum_all(g.mul(g.col_sums(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.softmax_rows(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    return g.sum_all(g.mul(g.l2_normalize_rows(p.bind(g, "a", true)), r));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto r = g.constant(weights);
    // psi on values inside (-1,1), away from the zero-angle edge
    auto c = g.mul_scalar(g.sigmoid_(p.bind(g, "a", true)), 0.9);
    return g.sum_all(g.mul(g.psi_margin(c, 4), r));
  });
}

TEST_CASE("finite differences: broadcast and vector ops") {
  ParamStore<double> ps;
  ps.create("x", {4, 5});
  ps.value("x") = random_tensor({4, 5}, 201);
  ps.create("v", {5});
  ps.value("v") = random_tensor({5}, 202, 0.2, 1.5);
  ps.create("u", {4});
  ps.value("u") = random_tensor({4}, 203, 0.2, 1.5);
  auto r = random_tensor({4, 5}, 204);

  auto run = [&](auto build) { CHECK(fd_max_rel_err(ps, build) < 1e-4); };

  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    return g.sum_all(g.mul(
        g.add_row_broadcast(p.bind(g, "x", true), p.bind(g, "v", true)), g.constant(r)));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    return g.sum_all(g.mul(
        g.add_col_broadcast(p.bind(g, "x", true), p.bind(g, "u", true)), g.constant(r)));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    return g.sum_all(g.mul(
        g.mul_row_broadcast(p.bind(g, "x", true), p.bind(g, "v", true)), g.constant(r)));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    return g.sum_all(g.mul(
        g.mul_col_broadcast(p.bind(g, "x", true), p.bind(g, "u", true)), g.constant(r)));
  });
  run([&](ParamGraph<double>& g, ParamStore<double>& p) {
    auto cat = g.concat_vec(p.bind(g, "v", true), p.bind(g, "u", true));
    return g.sum_all(g.mul(cat, g.constant(random_tensor({9}, 205))));
  });
}

TEST_CASE("finite differences: network blocks") {
  auto run = [&](ParamStore<double>& ps, auto build) {
    CHECK(fd_max_rel_err(ps, build, 1e-5, 64) < 1e-4);
  };

  SUBCASE("conv1d") {
    ParamStore<double> ps;
    ps.create("x", {3, 11});
    ps.value("x") = random_tensor({3, 11}, 301);
    ps.create("w", {2, 3, 3});
    ps.value("w") = random_tensor({2, 3, 3}, 302);
    auto r = random_tensor({2, 11}, 303);
    run(ps, [&](ParamGraph<double>& g, ParamStore<double>& p) {
      return g.sum_all(
          g.mul(g.conv1d(p.bind(g, "x", true), p.bind(g, "w", true), 3), g.constant(r)));
    });
  }
  SUBCASE("conv2d strided") {
    ParamStore<double> ps;
    ps.create("x", {2, 6, 9});
    ps.value("x") = random_tensor({2, 6, 9}, 311);
    ps.create("w", {3, 2, 3, 3});
    ps.value("w") = random_tensor({3, 2, 3, 3}, 312);
    auto r = random_tensor({3, 3, 5}, 313);
    run(ps, [&](ParamGraph<double>& g, ParamStore<double>& p) {
      return g.sum_all(
          g.mul(g.conv2d(p.bind(g, "x", true), p.bind(g, "w", true), 2, 2), g.constant(r)));
    });
  }
  SUBCASE("bn_adaptive") {
    ParamStore<double> ps;
    ps.create("x", {3, 10});
    ps.value("x") = random_tensor({3, 10}, 321);
    ps.create("gamma", {3});
    ps.value("gamma") = random_tensor({3}, 322, 0.5, 1.5);
    ps.create("beta", {3});
    ps.value("beta") = random_tensor({3}, 323);
    auto r = random_tensor({3, 10}, 324);
    run(ps, [&](ParamGraph<double>& g, ParamStore<double>& p) {
      return g.sum_all(g.mul(g.bn_adaptive(p.bind(g, "x", true), p.bind(g, "gamma", true),
                                           p.bind(g, "beta", true)),
                             g.constant(r)));
    });
  }
  SUBCASE("add_channel_bias on 3-D") {
    ParamStore<double> ps;
    ps.create("x", {3, 4, 5});
    ps.value("x") = random_tensor({3, 4, 5}, 331);
    ps.create("b", {3});
    ps.value("b") = random_tensor({3}, 332);
    auto r = random_tensor({3, 4, 5}, 333);
    run(ps, [&](ParamGraph<double>& g, ParamStore<double>& p) {
      return g.sum_all(g.mul(g.add_channel_bias(p.bind(g, "x", true), p.bind(g, "b", true)),
                             g.constant(r)));
    });
  }
  SUBCASE("mean_over_time and stats_pool") {
    ParamStore<double> ps;
    ps.create("x", {4, 9});
    ps.value("x") = random_tensor({4, 9}, 341);
    run(ps, [&](ParamGraph<double>& g, ParamStore<double>& p) {
      return g.sum_all(
          g.mul(g.mean_over_time(p.bind(g, "x", true)), g.constant(random_tensor({4}, 342))));
    });
    run(ps, [&](ParamGraph<double>& g, ParamStore<double>& p) {
      return g.sum_all(
          g.mul(g.stats_pool(p.bind(g, "x", true)), g.constant(random_tensor({8}, 343))));
    });
  }
  SUBCASE("online_mean_norm") {
    ParamStore<double> ps;
    ps.create("x", {2, 15});
    ps.value("x") = random_tensor({2, 15}, 351);
    auto r = random_tensor({2, 15}, 352);
    run(ps, [&](ParamGraph<double>& g, ParamStore<double>& p) {
      return g.sum_all(g.mul(g.online_mean_norm(p.bind(g, "x", true), 5), g.constant(r)));
    });
  }
  SUBCASE("cross_entropy_logits") {
    ParamStore<double> ps;
    ps.create("z", {6});
    ps.value("z") = random_tensor({6}, 361, -2, 2);
    run(ps, [&](ParamGraph<double>& g, ParamStore<double>& p) {
      return g.cross_entropy_logits(p.bind(g, "z", true), 2);
    });
  }
}

TEST_CASE("stats_pool floors the std of constant input") {
  ParamGraph<double> g;
  Tensor<double> x({3, 7});
  x.fill(2.5);
  auto y = g.stats_pool(g.constant(x), 1e-5);
  CHECK(g.value(y).numel() == 6);
  for (int c = 0; c < 3; ++c) {
    CHECK(g.value(y)[c] == doctest::Approx(2.5));
    CHECK(g.value(y)[3 + c] == doctest::Approx(1e-5));
  }
}

TEST_CASE("online_mean_norm spec examples") {
  SUBCASE("constant input maps to zeros") {
    ParamGraph<double> g;
    Tensor<double> x({2, 40});
    x.fill(3.25);
    auto y = g.online_mean_norm(g.constant(x), 301);
    for (int64_t i = 0; i < x.numel(); ++i) CHECK(g.value(y)[i] == doctest::Approx(0.0));
  }
  SUBCASE("short input equals full-mean subtraction") {
    auto x = random_tensor({3, 50}, 401);
    ParamGraph<double> g;
    auto y = g.online_mean_norm(g.constant(x), 301);
    for (int64_t d = 0; d < 3; ++d) {
      double mu = 0;
      for (int64_t t = 0; t < 50; ++t) mu += x.at(d, t);
      mu /= 50;
      for (int64_t t = 0; t < 50; ++t)
        CHECK(g.value(y).at(d, t) == doctest::Approx(x.at(d, t) - mu));
    }
  }
  SUBCASE("impulse in zero background keeps (1 - 1/301) of itself") {
    Tensor<double> x({1, 1000});
    x.at(0, 500) = 4.0;
    ParamGraph<double> g;
    auto y = g.online_mean_norm(g.constant(x), 301);
    CHECK(g.value(y).at(0, 500) == doctest::Approx(4.0 * (1.0 - 1.0 / 301.0)));
  }
}

TEST_CASE("psi_margin values and reduction to cosine at m=1") {
  ParamGraph<double> g;
  auto c = g.constant(Tensor<double>({3}, {0.999999, 0.3, -0.7}));
  auto p1 = g.psi_margin(c, 1);
  CHECK(g.value(p1)[1] == doctest::Approx(0.3));
  CHECK(g.value(p1)[2] == doctest::Approx(-0.7));
  auto p4 = g.psi_margin(c, 4);
  CHECK(g.value(p4)[0] == doctest::Approx(1.0).epsilon(1e-4));  // theta ~ 0
  // psi is monotone decreasing in theta: larger cosine => larger psi.
  CHECK(g.value(p4)[1] > g.value(p4)[2]);
}

TEST_CASE("adam_step") {
  SUBCASE("zero gradient leaves params unchanged") {
    ParamStore<float> ps;
    ps.create_const("p", {3}, 1.5f);
    ps.zero_grads();
    OptimState<float> st;
    adam_step(ps, st, 0);
    for (int i = 0; i < 3; ++i) CHECK(ps.value("p")[i] == doctest::Approx(1.5f));
  }
  SUBCASE("first step moves by about -lr for positive gradient") {
    ParamStore<double> ps;
    ps.create_const("p", {1}, 0.0);
    ps.grad("p")[0] = 2.0;
    OptimState<double> st;
    st.schedule.base_rate = 0.001;
    st.schedule.decay_per_epoch = 1.0;
    adam_step(ps, st, 0);
    CHECK(ps.value("p")[0] == doctest::Approx(-0.001).epsilon(1e-6));
  }
  SUBCASE("identical gradients produce identical updates") {
    ParamStore<double> ps;
    ps.create_const("a", {1}, 0.3);
    ps.create_const("b", {1}, 0.3);
    ps.grad("a")[0] = -0.7;
    ps.grad("b")[0] = -0.7;
    OptimState<double> st;
    adam_step(ps, st, 1);
    CHECK(ps.value("a")[0] == ps.value("b")[0]);
  }
  SUBCASE("warmup: step-1 rate is base/warmup_steps") {
    LrSchedule s{0.001, 1.0, 10};
    CHECK(s.rate(1, 0) == doctest::Approx(0.0001));
    CHECK(s.rate(10, 0) == doctest::Approx(0.001));
    CHECK(s.rate(11, 0) == doctest::Approx(0.001));
  }
  SUBCASE("exponential decay per epoch") {
    LrSchedule s{0.001, 0.5, 0};
    CHECK(s.rate(100, 2) == doctest::Approx(0.00025));
  }
}

TEST_CASE("non-finite values raise instead of propagating") {
  ParamGraph<double> g;
  auto x = g.constant(Tensor<double>({2}, {1.0, 710.0}));
  CHECK_THROWS_AS(g.exp_(x), std::runtime_error);  // overflow to inf
}

TEST_CASE("graph determinism: identical inputs give identical values") {
  auto build_and_eval = [](uint64_t seed) {
    ParamStore<float> ps;
    ps.create_kaiming("w", {4, 3, 3}, 9, seed);
    Tensor<float> x = random_tensor({3, 20}, 7).cast<float>();
    ParamGraph<float> g;
    auto y = g.conv1d(g.constant(x), ps.bind(g, "w", true), 2);
    auto loss = g.sum_all(g.mul(y, y));
    return g.scalar_value(loss);
  };
  CHECK(build_and_eval(42) == build_and_eval(42));
  CHECK(build_and_eval(42) != build_and_eval(43));
}

TEST_CASE("checkpoint round trip preserves names, shapes, f32 values") {
  ParamStore<float> ps;
  ps.create_kaiming("conv.w", {2, 3, 3}, 9, 77);
  ps.create_gauss("emb.w", {4, 5}, 0.1, 78);
  ps.create_const("bn.gamma", {4}, 1.0f);
  std::string path = "ckpt_roundtrip.bin";
  save_checkpoint(ps, path);
  auto loaded = load_checkpoint<float>(path);
  REQUIRE(loaded.size() == ps.size());
  for (const auto& name : ps.names()) {
    REQUIRE(loaded.has(name));
    const auto& a = ps.value(name);
    const auto& b = loaded.value(name);
    REQUIRE(a.shape() == b.shape());
    for (int64_t i = 0; i < a.numel(); ++i) CHECK(a[i] == b[i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("param gradients accumulate across multiple uses") {
  ParamStore<double> ps;
  ps.create_const("x", {1}, 2.0);
  ParamGraph<double> g;
  auto x1 = ps.bind(g, "x", true);
  auto x2 = ps.bind(g, "x", true);
  auto loss = g.sum_all(g.mul(x1, x2));  // x^2, two bindings
  g.backward(loss);
  CHECK(ps.grad("x")[0] == doctest::Approx(4.0));
}
