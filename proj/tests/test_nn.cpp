#include <cmath>

#include "doctest.h"
#include "l2g/error.hpp"
#include "l2g/nn.hpp"

using namespace l2g;
using namespace l2g::nn;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(-scale, scale);
  return t;
}

// Weighted sum of an output against fixed random coefficients, so every
// output element carries a distinct gradient.
double weighted(const Tensor& y, const Tensor& coef) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * coef[i];
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_SUITE("nn") {
  TEST_CASE("tensor basics") {
    Tensor t({2, 3}, 1.5);
    CHECK(t.size() == 6);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    CHECK(Tensor::vector(4).rows() == 1);
    CHECK(code_of([] { Tensor({2, 2}, std::vector<double>{1, 2, 3}); }) == ErrorCode::kShapeMismatch);
    CHECK(t.all_finite());
    t[0] = std::nan("");
    CHECK_FALSE(t.all_finite());
    CHECK(shape_string({2, 3}) == "[2, 3]");
  }

  TEST_CASE("param store") {
    ParamStore ps;
    ps.add("w", Tensor({2, 2}, 1.0));
    ps.add("b", Tensor({2}, 0.0));
    CHECK(ps.scalar_count() == 6);
    CHECK(ps.get("w").grad.same_shape(ps.get("w").value));
    CHECK(code_of([&] { ps.add("w", Tensor({1})); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([&] { ps.get("nope"); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("glorot bounds") {
    Rng rng(1);
    const auto w = glorot_uniform(30, 50, rng);
    const double bound = std::sqrt(6.0 / 80.0);
    double mx = 0.0;
    for (double v : w.values()) {
      CHECK(std::abs(v) <= bound);
      mx = std::max(mx, std::abs(v));
    }
    CHECK(mx > 0.9 * bound);
  }

  TEST_CASE("linear examples") {
    Rng rng(2);
    const auto x = random_tensor({3, 4}, rng);
    Tensor eye({4, 4});
    for (std::size_t i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
    CHECK(linear(x, eye, Tensor({4})) == x);
    const auto y = linear(x, Tensor({4, 2}), Tensor({2}, 0.25));
    for (double v : y.values()) CHECK(v == 0.25);
    CHECK(code_of([&] { linear(x, Tensor({3, 2}), Tensor({2})); }) == ErrorCode::kShapeMismatch);
  }

  TEST_CASE("linear backward matches finite differences") {
    Rng rng(3);
    ParamStore ps;
    ps.add("x", random_tensor({3, 4}, rng));
    ps.add("w", random_tensor({4, 5}, rng));
    ps.add("b", random_tensor({5}, rng));
    const auto coef = random_tensor({3, 5}, rng);
    auto loss = [&](ParamStore& p) {
      return weighted(linear(p.get("x").value, p.get("w").value, p.get("b").value), coef);
    };
    auto grads = [&](ParamStore& p) {
      Tensor dx;
      linear_backward(p.get("x").value, p.get("w").value, coef, p.get("w").grad, p.get("b").grad, &dx);
      p.get("x").grad = dx;
    };
    const auto r = gradient_check(loss, grads, ps, 1e-8);
    CHECK(r.passed);
    CHECK(r.max_rel_error <= 1e-8);
    CHECK(r.checked == 12 + 20 + 5);
  }

  TEST_CASE("activations and their backward passes") {
    Rng rng(4);
    Tensor x({2, 3}, std::vector<double>{-2, -0.5, 0.0, 0.3, 1, 40});
    const auto r = relu(x);
    CHECK(r[0] == 0.0);
    CHECK(r[3] == 0.3);
    const auto s = sigmoid(x);
    CHECK(s[2] == doctest::Approx(0.5));
    CHECK(s[5] == 1.0 - kSigmoidFloor);
    CHECK(sigmoid(Tensor({1}, -100.0))[0] == kSigmoidFloor);
    CHECK(nn::tanh(x)[4] == doctest::Approx(std::tanh(1.0)));

    using Fwd = Tensor (*)(const Tensor&);
    using Bwd = Tensor (*)(const Tensor&, const Tensor&);
    const std::vector<std::pair<Fwd, Bwd>> cases{{&nn::tanh, &nn::tanh_backward},
                                                 {&nn::sigmoid, &nn::sigmoid_backward},
                                                 {&nn::relu, &nn::relu_backward}};
    for (const auto& [fwd, bwd] : cases) {
      ParamStore ps;
      auto v = random_tensor({4, 6}, rng, 2.0);
      for (auto& e : v.values()) {
        if (std::abs(e) < 1e-3) e = 0.5;  // keep relu away from its kink
      }
      ps.add("x", v);
      const auto coef = random_tensor({4, 6}, rng);
      const auto r = gradient_check([&](ParamStore& p) { return weighted(fwd(p.get("x").value), coef); },
                                    [&](ParamStore& p) { p.get("x").grad = bwd(fwd(p.get("x").value), coef); },
                                    ps, 1e-4);
      CHECK(r.passed);
    }
  }

  TEST_CASE("concat and slice are inverse") {
    Rng rng(5);
    const auto a = random_tensor({3, 2}, rng);
    const auto b = random_tensor({3, 4}, rng);
    const auto c = concat_cols({&a, &b});
    CHECK(c.cols() == 6);
    CHECK(slice_cols(c, 0, 2) == a);
    CHECK(slice_cols(c, 2, 4) == b);
    const auto bad = random_tensor({2, 4}, rng);
    CHECK(code_of([&] { concat_cols({&a, &bad}); }) == ErrorCode::kShapeMismatch);
  }

  TEST_CASE("rnn: examples") {
    Tensor emb({3, 2}, 0.0), wx({2, 4}, 0.0), wh({4, 4}, 0.0);
    Tensor b({4}, std::vector<double>{0.1, -0.2, 0.3, 0.0});
    const RnnWeights w{emb, wx, wh, b};
    const std::vector<int> one{1};
    const auto h = rnn_encode(one, w);
    for (std::size_t i = 0; i < 4; ++i) CHECK(h[i] == doctest::Approx(std::tanh(b[i])));
    CHECK(code_of([&] { rnn_encode(std::vector<int>{}, w); }) == ErrorCode::kEmptySequence);
    CHECK(code_of([&] { rnn_encode(std::vector<int>{3}, w); }) == ErrorCode::kInvalidArgument);

    Rng rng(6);
    const auto e2 = random_tensor({3, 2}, rng), x2 = random_tensor({2, 4}, rng),
               h2 = random_tensor({4, 4}, rng), b2 = random_tensor({4}, rng);
    const RnnWeights rw{e2, x2, h2, b2};
    CHECK_FALSE(rnn_encode(std::vector<int>{0, 2}, rw) == rnn_encode(std::vector<int>{2, 0}, rw));
  }

  TEST_CASE("rnn: batched rows equal single encodes") {
    Rng rng(7);
    const auto e = random_tensor({5, 3}, rng), x = random_tensor({3, 4}, rng),
               h = random_tensor({4, 4}, rng), b = random_tensor({4}, rng);
    const RnnWeights w{e, x, h, b};
    const std::vector<int> s1{0, 1, 2}, s2{4}, s3{3, 3, 1, 0, 2};
    const auto batch = rnn_forward({s1, s2, s3}, w, nullptr);
    int r = 0;
    for (const auto* s : {&s1, &s2, &s3}) {
      const auto single = rnn_encode(*s, w);
      for (std::size_t i = 0; i < 4; ++i) CHECK(batch.at(r, i) == doctest::Approx(single[i]).epsilon(1e-14));
      ++r;
    }
  }

  TEST_CASE("rnn backward through time matches finite differences") {
    Rng rng(8);
    ParamStore ps;
    ps.add("emb", random_tensor({5, 3}, rng));
    ps.add("wx", random_tensor({3, 4}, rng));
    ps.add("wh", random_tensor({4, 4}, rng));
    ps.add("b", random_tensor({4}, rng));
    const std::vector<int> s1{0, 1, 2}, s2{4, 1}, s3{3};
    const std::vector<std::span<const int>> batch{s1, s2, s3};
    const auto coef = random_tensor({3, 4}, rng);
    auto weights = [](ParamStore& p) {
      return RnnWeights{p.get("emb").value, p.get("wx").value, p.get("wh").value, p.get("b").value};
    };
    const auto r = gradient_check(
        [&](ParamStore& p) { return weighted(rnn_forward(batch, weights(p), nullptr), coef); },
        [&](ParamStore& p) {
          RnnCache cache;
          rnn_forward(batch, weights(p), &cache);
          rnn_backward(cache, weights(p), coef,
                       {p.get("emb").grad, p.get("wx").grad, p.get("wh").grad, p.get("b").grad});
        },
        ps, 1e-4);
    CHECK(r.passed);
    MESSAGE("rnn max rel error " << r.max_rel_error);
  }

  TEST_CASE("losses: values") {
    Tensor t({1, 3}, std::vector<double>{1, 0, 1});
    Tensor p({1, 3}, std::vector<double>{1 - kSigmoidFloor, kSigmoidFloor, 1 - kSigmoidFloor});
    CHECK(bce_loss(p, t, nullptr) <= 1e-6);
    Tensor half({1, 3}, 0.5);
    CHECK(bce_loss(half, t, nullptr) == doctest::Approx(std::log(2.0)));
    CHECK(kl_loss(Tensor({2, 3}), Tensor({2, 3}), nullptr, nullptr) == 0.0);
    CHECK(kl_loss(Tensor({1, 1}, 1.0), Tensor({1, 1}), nullptr, nullptr) == doctest::Approx(0.5));
    CHECK(code_of([&] { bce_loss(half, Tensor({1, 2}), nullptr); }) == ErrorCode::kShapeMismatch);
    CHECK(code_of([&] { kl_loss(Tensor({1, 2}), Tensor({1, 3}), nullptr, nullptr); }) ==
          ErrorCode::kShapeMismatch);
  }

  TEST_CASE("kl is non-negative and zero only at the prior") {
    Rng rng(9);
    for (int k = 0; k < 500; ++k) {
      const auto mu = random_tensor({2, 3}, rng, 2.0);
      const auto lv = random_tensor({2, 3}, rng, 3.0);
      CHECK(kl_loss(mu, lv, nullptr, nullptr) > 0.0);
    }
  }

  TEST_CASE("loss gradients match finite differences") {
    Rng rng(10);
    ParamStore ps;
    auto probs = random_tensor({3, 4}, rng, 0.4);
    for (auto& v : probs.values()) v += 0.5;
    ps.add("p", probs);
    ps.add("mu", random_tensor({3, 2}, rng));
    ps.add("lv", random_tensor({3, 2}, rng));
    Tensor t({3, 4});
    for (auto& v : t.values()) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const auto r = gradient_check(
        [&](ParamStore& p) {
          return bce_loss(p.get("p").value, t, nullptr) +
                 0.6 * kl_loss(p.get("mu").value, p.get("lv").value, nullptr, nullptr);
        },
        [&](ParamStore& p) {
          bce_loss(p.get("p").value, t, &p.get("p").grad);
          Tensor dmu, dlv;
          kl_loss(p.get("mu").value, p.get("lv").value, &dmu, &dlv);
          for (std::size_t i = 0; i < dmu.size(); ++i) {
            p.get("mu").grad[i] = 0.6 * dmu[i];
            p.get("lv").grad[i] = 0.6 * dlv[i];
          }
        },
        ps, 1e-4);
    CHECK(r.passed);
  }

  TEST_CASE("adam") {
    ParamStore ps;
    ps.add("w", Tensor({3}, std::vector<double>{1, 2, 3}));
    Adam adam;
    CHECK(code_of([&] { adam.step(ps); }) == ErrorCode::kUninitializedState);
    adam.init(ps);
    const auto before = ps.get("w").value;
    adam.step(ps);
    CHECK(ps.get("w").value == before);  // zero gradient

    Adam fresh;
    fresh.init(ps);
    ps.get("w").grad = Tensor({3}, std::vector<double>{0.3, -7.0, 1e-3});
    fresh.step(ps);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(ps.get("w").value[i] - before[i]) == doctest::Approx(fresh.config().lr).epsilon(1e-3));
    }
    CHECK(fresh.steps() == 1);

    ParamStore other;
    other.add("w", Tensor({4}));
    CHECK(code_of([&] { fresh.step(other); }) == ErrorCode::kUninitializedState);
  }

  TEST_CASE("adam runs are bitwise reproducible") {
    auto run = [] {
      Rng rng(11);
      ParamStore ps;
      ps.add("w", random_tensor({4, 4}, rng));
      Adam adam;
      adam.init(ps);
      for (int s = 0; s < 50; ++s) {
        for (std::size_t i = 0; i < 16; ++i) ps.get("w").grad[i] = ps.get("w").value[i] * rng.normal();
        adam.step(ps);
      }
      return ps;
    };
    CHECK(run() == run());
  }

  TEST_CASE("gradient check catches a corrupted gradient") {
    Rng rng(12);
    ParamStore ps;
    ps.add("x", random_tensor({5}, rng));
    auto loss = [](ParamStore& p) {
      double s = 0.0;
      for (double v : p.get("x").value.values()) s += v * v;
      return s;
    };
    auto good = [](ParamStore& p) {
      for (std::size_t i = 0; i < 5; ++i) p.get("x").grad[i] = 2.0 * p.get("x").value[i];
    };
    auto bad = [&](ParamStore& p) {
      good(p);
      p.get("x").grad[3] *= 1.01;
    };
    CHECK(gradient_check(loss, good, ps, 1e-8).passed);
    const auto r = gradient_check(loss, bad, ps, 1e-4);
    CHECK_FALSE(r.passed);
    CHECK(r.worst_param == "x");
    CHECK(r.worst_index == 3);
  }

  TEST_CASE("relative error floor") {
    CHECK(relative_error(1.0, 1.0) == 0.0);
    CHECK(relative_error(2.0, 1.0) == doctest::Approx(0.5));
    CHECK(relative_error(1e-12, 0.0) == doctest::Approx(1e-5));
  }
}
