/*
 * Copyright 2026 The LAP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <random>

#include "doctest.h"
#include "lap/checkpoint.hpp"
#include "lap/model.hpp"
#include "lap/optim.hpp"
#include "test_util.hpp"

namespace {

using namespace lap;
using lap::testing::random_matrix;
using lap::testing::random_params;
using lap::testing::random_vector;
using lap::testing::scratch_dir;

// Straight-line evaluation of one row: explicit loops, no Eigen products.
double forward_oracle(const Matrix<double>& x, Index row, const MlpParams<double>& p) {
  std::vector<double> h(x.cols());
  for (Index k = 0; k < x.cols(); ++k) h[k] = x(row, k);
  for (Index l = 0; l < p.layers(); ++l) {
    const auto& w = p.weight(l);
    std::vector<double> z(w.rows());
    for (Index o = 0; o < w.rows(); ++o) {
      double acc = p.bias(l)(o, 0);
      for (Index i = 0; i < w.cols(); ++i) acc += w(o, i) * h[i];
      z[o] = (l + 1 == p.layers()) ? acc : std::max(acc, 0.0);
    }
    h = z;
  }
  const double s = 1.0 / (1.0 + std::exp(-h[0]));
  return std::clamp(s, kScoreEpsilon, 1.0 - kScoreEpsilon);
}

double min_abs_preactivation(const Matrix<double>& x, const MlpParams<double>& p) {
  MlpCache<double> cache;
  forward(x, p, &cache);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : cache.pre) m = std::min(m, z.cwiseAbs().minCoeff());
  return m;
}

}  // namespace

TEST_CASE("feature fusion") {
  Matrix<double> v(1, 2), t(1, 2);
  v << 1, 2;
  t << 3, 4;
  const auto cat = fuse(v, t, {FusionMode::kConcat, 2, 2});
  CHECK(cat == (Matrix<double>(1, 4) << 1, 2, 3, 4).finished());
  const auto add = fuse(v, t, {FusionMode::kAdd, 2, 2});
  CHECK(add == (Matrix<double>(1, 2) << 4, 6).finished());
  CHECK(fuse(t, v, {FusionMode::kAdd, 2, 2}) == add);

  const Matrix<double> t3 = Matrix<double>::Ones(1, 3);
  CHECK_THROWS_AS(fuse(v, t3, {FusionMode::kAdd, 2, 3}), Error);
  CHECK(fuse(v, t3, {FusionMode::kConcat, 2, 3}).cols() == 5);
  CHECK(parse_fusion_mode("add") == FusionMode::kAdd);
  CHECK(to_string(FusionMode::kConcat) == "concat");
  CHECK_THROWS_AS(parse_fusion_mode("sum"), Error);
}

TEST_CASE("forward pass") {
  std::mt19937_64 rng(10);
  const MlpShape shape{5, {7, 3}};

  SUBCASE("all-zero parameters give 0.5") {
    const auto scores = forward(random_matrix(4, 5, rng), MlpParams<double>::zeros(shape));
    CHECK(scores == Vector<double>::Constant(4, 0.5));
  }
  SUBCASE("identical rows give identical scores") {
    Matrix<double> x(3, 5);
    const Matrix<double> r = random_matrix(1, 5, rng);
    x << r, r, r;
    const auto s = forward(x, init_mlp<double>(shape, 1));
    CHECK(s(0) == s(1));
    CHECK(s(1) == s(2));
  }
  SUBCASE("matches the straight-line oracle") {
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_params(shape, rng, 1.5);
      const auto x = random_matrix(6, 5, rng, -3, 3);
      const auto s = forward(x, p);
      for (Index i = 0; i < x.rows(); ++i) CHECK(std::abs(s(i) - forward_oracle(x, i, p)) < 1e-6);
      CHECK(s.minCoeff() >= kScoreEpsilon);
      CHECK(s.maxCoeff() <= 1.0 - kScoreEpsilon);
    }
  }
  SUBCASE("row permutation permutes scores") {
    const auto p = random_params(shape, rng);
    const auto x = random_matrix(8, 5, rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(8);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + 8, rng);
    const Matrix<double> px = perm * x;
    CHECK((forward(px, p) - perm * forward(x, p)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("saturated logits are clamped") {
    auto p = MlpParams<double>::zeros(shape);
    p.bias(2)(0, 0) = 100;
    CHECK(forward(random_matrix(2, 5, rng), p)(0) == 1.0 - kScoreEpsilon);
    p.bias(2)(0, 0) = -100;
    CHECK(forward(random_matrix(2, 5, rng), p)(0) == kScoreEpsilon);
  }
  SUBCASE("wrong width and non-finite input are rejected") {
    const auto p = init_mlp<double>(shape, 0);
    CHECK_THROWS_AS(forward(random_matrix(2, 4, rng), p), Error);
    Matrix<double> x = random_matrix(2, 5, rng);
    x(1, 1) = std::nan("");
    CHECK_THROWS_AS(forward(x, p), Error);
  }
  SUBCASE("initialization is seeded Glorot-uniform") {
    const auto a = init_mlp<double>({64, {512, 128}}, 3);
    const auto b = init_mlp<double>({64, {512, 128}}, 3);
    CHECK(a.flatten() == b.flatten());
    CHECK(a.weight(0).cwiseAbs().maxCoeff() <= std::sqrt(6.0 / (64 + 512)));
    CHECK(a.bias(1).isZero());
    CHECK(a.parameter_count() == 64 * 512 + 512 + 512 * 128 + 128 + 128 + 1);
  }
}

TEST_CASE("backward pass") {
  std::mt19937_64 rng(12);
  const MlpShape shape{4, {6, 5}};

  SUBCASE("zero upstream gradient gives zero gradients") {
    const auto p = random_params(shape, rng);
    MlpCache<double> cache;
    forward(random_matrix(3, 4, rng), p, &cache);
    const auto g = backward(cache, p, Vector<double>(Vector<double>::Zero(3)));
    CHECK(g.params.flatten().isZero());
    CHECK(g.features.isZero());
  }
  SUBCASE("single linear path closed form") {
    // One hidden unit per layer with positive pre-activations: s = sigma(w2 w1 w0 x).
    MlpShape tiny{1, {1, 1}};
    auto p = MlpParams<double>::zeros(tiny);
    p.weight(0)(0, 0) = 0.5;
    p.weight(1)(0, 0) = 2.0;
    p.weight(2)(0, 0) = 1.5;
    Matrix<double> x(1, 1);
    x << 0.8;
    MlpCache<double> cache;
    const double s = forward(x, p, &cache)(0);
    const double sig = 1.0 / (1.0 + std::exp(-1.2));
    CHECK(s == doctest::Approx(sig));
    const auto g = backward(cache, p, Vector<double>(Vector<double>::Ones(1)));
    const double ds = sig * (1 - sig);
    CHECK(g.params.weight(2)(0, 0) == doctest::Approx(ds * 0.8));
    CHECK(g.params.weight(0)(0, 0) == doctest::Approx(ds * 1.5 * 2.0 * 0.8));
    CHECK(g.params.bias(1)(0, 0) == doctest::Approx(ds * 1.5));
    CHECK(g.features(0, 0) == doctest::Approx(ds * 1.5 * 2.0 * 0.5));
  }
  SUBCASE("agrees with central differences away from rectifier kinks") {
    int checked = 0;
    while (checked < 10) {
      const auto p = random_params(shape, rng);
      const auto x = random_matrix(5, 4, rng);
      if (min_abs_preactivation(x, p) < 1e-2) continue;
      ++checked;
      const auto w = random_vector(5, rng);
      MlpCache<double> cache;
      forward(x, p, &cache);
      const auto g = backward(cache, p, w);
      auto objective = [&](const Vector<double>& flat) {
        auto q = p;
        q.unflatten(flat);
        return w.dot(forward(x, q));
      };
      const auto report = grad_check(objective, p.flatten(), g.params.flatten());
      CHECK(report.reliable());
      CHECK(report.max_relative_error < 1e-5);

      auto by_input = [&](const Vector<double>& flat) {
        return w.dot(forward(flat.reshaped(5, 4), p));
      };
      const Vector<double> xflat = x.reshaped();
      const Vector<double> gx = g.features.reshaped();
      CHECK(grad_check(by_input, xflat, gx).max_relative_error < 1e-5);
    }
  }
  SUBCASE("mismatched upstream gradient is rejected") {
    const auto p = random_params(shape, rng);
    MlpCache<double> cache;
    forward(random_matrix(3, 4, rng), p, &cache);
    CHECK_THROWS_AS(backward(cache, p, Vector<double>(Vector<double>::Zero(2))), Error);
  }
}

TEST_CASE("temporal smoother") {
  Vector<double> s(3);
  s << 0, 1, 0;
  const auto out = smooth_scores(s, {true, 3});
  CHECK(out(0) == doctest::Approx(0.5));
  CHECK(out(1) == doctest::Approx(1.0 / 3.0));
  CHECK(out(2) == doctest::Approx(0.5));
  CHECK(smooth_scores(s, {false, 3}) == s);
  CHECK(smooth_scores(s, {true, 1}) == s);
  Vector<double> c = Vector<double>::Constant(9, 0.4);
  CHECK(smooth_scores(c, {true, 5}).isApprox(c));
  CHECK_THROWS_AS(smooth_scores(s, {true, 4}), Error);
  CHECK_THROWS_AS(smooth_scores(s, {true, 0}), Error);
}

TEST_CASE("checkpoint round trip") {
  std::mt19937_64 rng(9);
  ModelMeta meta;
  meta.fusion = {FusionMode::kAdd, 6, 6};
  meta.shape = {6, {8, 4}};
  meta.length = 16;
  meta.smoother = {true, 3};
  meta.visual_only = true;
  const auto p = random_params(meta.shape, rng);
  const auto dir = scratch_dir("ckpt");
  save_checkpoint(dir / "m.lapc", p, meta);
  CHECK(std::filesystem::exists(dir / "m.json"));
  const auto loaded = load_checkpoint(dir / "m.lapc");
  CHECK(loaded.params.flatten() == p.flatten());
  CHECK(loaded.meta.fusion.mode == FusionMode::kAdd);
  CHECK(loaded.meta.shape.hidden == meta.shape.hidden);
  CHECK(loaded.meta.length == 16);
  CHECK(loaded.meta.smoother.enabled);
  CHECK(loaded.meta.smoother.window == 3);
  CHECK(loaded.meta.visual_only);

  std::filesystem::resize_file(dir / "m.lapc", std::filesystem::file_size(dir / "m.lapc") - 8);
  CHECK_THROWS_AS(load_checkpoint(dir / "m.lapc"), Error);
}
