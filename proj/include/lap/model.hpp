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

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lap/core.hpp"

namespace lap {

enum class FusionMode { kConcat, kAdd };

std::string to_string(FusionMode mode);
FusionMode parse_fusion_mode(const std::string& name);

struct FusionConfig {
  FusionMode mode = FusionMode::kConcat;
  Index visual_dim = 0;
  Index semantic_dim = 0;

  Index fused_dim() const { return mode == FusionMode::kConcat ? visual_dim + semantic_dim : visual_dim; }
  void validate() const;
};

/// Feature synthesis: rowwise [V | T] for concat, V + T for add.
template <typename DerivedV, typename DerivedT>
Matrix<typename DerivedV::Scalar> fuse(const Eigen::MatrixBase<DerivedV>& visual,
                                       const Eigen::MatrixBase<DerivedT>& semantic,
                                       const FusionConfig& cfg) {
  cfg.validate();
  require(visual.rows() == semantic.rows(), "fuse: visual and semantic row counts differ");
  require(visual.cols() == cfg.visual_dim,
          "fuse: visual dim " + std::to_string(visual.cols()) + ", expected " +
              std::to_string(cfg.visual_dim));
  require(semantic.cols() == cfg.semantic_dim,
          "fuse: semantic dim " + std::to_string(semantic.cols()) + ", expected " +
              std::to_string(cfg.semantic_dim));
  Matrix<typename DerivedV::Scalar> fused(visual.rows(), cfg.fused_dim());
  if (cfg.mode == FusionMode::kConcat) {
    fused << visual, semantic;
  } else {
    fused = visual + semantic;
  }
  return fused;
}

inline constexpr double kScoreEpsilon = 1e-7;

struct MlpShape {
  Index input_dim = 0;
  std::vector<Index> hidden = {512, 128};

  Index layers() const { return static_cast<Index>(hidden.size()) + 1; }
  Index fan_in(Index layer) const { return layer == 0 ? input_dim : hidden[layer - 1]; }
  Index fan_out(Index layer) const { return layer + 1 == layers() ? 1 : hidden[layer]; }
};

/// Score predictor parameters. Tensors are stored as [W0, b0, W1, b1, ...]
/// with W_l of shape fan_out x fan_in and b_l a fan_out x 1 column, so the
/// optimizer and the checkpoint container can treat them uniformly.
template <typename Scalar>
struct MlpParams {
  MlpShape shape;
  std::vector<Matrix<Scalar>> tensors;

  Index layers() const { return shape.layers(); }
  Matrix<Scalar>& weight(Index l) { return tensors[2 * l]; }
  const Matrix<Scalar>& weight(Index l) const { return tensors[2 * l]; }
  Matrix<Scalar>& bias(Index l) { return tensors[2 * l + 1]; }
  const Matrix<Scalar>& bias(Index l) const { return tensors[2 * l + 1]; }

  static MlpParams zeros(const MlpShape& shape) {
    require(shape.input_dim >= 1, "MLP input dimension must be positive");
    MlpParams p;
    p.shape = shape;
    for (Index l = 0; l < shape.layers(); ++l) {
      require(shape.fan_out(l) >= 1, "MLP hidden widths must be positive");
      p.tensors.push_back(Matrix<Scalar>::Zero(shape.fan_out(l), shape.fan_in(l)));
      p.tensors.push_back(Matrix<Scalar>::Zero(shape.fan_out(l), 1));
    }
    return p;
  }

  static std::string tensor_name(std::size_t i) {
    return (i % 2 == 0 ? "weight" : "bias") + std::to_string(i / 2);
  }

  Index parameter_count() const {
    Index n = 0;
    for (const auto& t : tensors) n += t.size();
    return n;
  }

  bool all_finite() const {
    for (const auto& t : tensors) {
      if (!t.allFinite()) return false;
    }
    return true;
  }

  Vector<Scalar> flatten() const {
    Vector<Scalar> flat(parameter_count());
    Index at = 0;
    for (const auto& t : tensors) {
      flat.segment(at, t.size()) = t.reshaped();
      at += t.size();
    }
    return flat;
  }

  void unflatten(const Vector<Scalar>& flat) {
    require(flat.size() == parameter_count(), "unflatten: size mismatch");
    Index at = 0;
    for (auto& t : tensors) {
      t.reshaped() = flat.segment(at, t.size());
      at += t.size();
    }
  }
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)) drawn in tensor
/// order, column-major, from mt19937_64(seed); biases start at zero.
template <typename Scalar>
MlpParams<Scalar> init_mlp(const MlpShape& shape, std::uint64_t seed) {
  auto params = MlpParams<Scalar>::zeros(shape);
  std::mt19937_64 rng(seed);
  for (Index l = 0; l < shape.layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(shape.fan_in(l) + shape.fan_out(l)));
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto& w = params.weight(l);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(dist(rng));
  }
  return params;
}

template <typename Scalar>
Scalar logistic(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
struct MlpCache {
  std::vector<Matrix<Scalar>> inputs;  // input to each layer (post-rectifier)
  std::vector<Matrix<Scalar>> pre;     // pre-activation of each hidden layer
  Vector<Scalar> logits;
  Vector<Scalar> scores;
};

template <typename Scalar, typename Derived>
Vector<Scalar> forward(const Eigen::MatrixBase<Derived>& features, const MlpParams<Scalar>& params,
                       MlpCache<Scalar>* cache = nullptr) {
  require(features.cols() == params.shape.input_dim,
          "forward: feature dim " + std::to_string(features.cols()) + " does not match model d_f " +
              std::to_string(params.shape.input_dim));
  require(features.allFinite(), "forward: non-finite input feature");
  Matrix<Scalar> h = features.template cast<Scalar>();
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  const Index last = params.layers() - 1;
  for (Index l = 0; l < last; ++l) {
    Matrix<Scalar> z = h * params.weight(l).transpose();
    z.rowwise() += params.bias(l).col(0).transpose();
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->pre.push_back(z);
    }
    h = z.cwiseMax(Scalar(0));
  }
  Vector<Scalar> logits = h * params.weight(last).transpose();
  logits.array() += params.bias(last)(0, 0);
  const Scalar eps = static_cast<Scalar>(kScoreEpsilon);
  Vector<Scalar> scores =
      logits.unaryExpr([eps](Scalar z) { return std::clamp(logistic(z), eps, Scalar(1) - eps); });
  if (cache) {
    cache->inputs.push_back(std::move(h));
    cache->logits = logits;
    cache->scores = scores;
  }
  return scores;
}

template <typename Scalar>
struct MlpGradients {
  MlpParams<Scalar> params;
  Matrix<Scalar> features;
};

/// Exact gradients of forward() given dL/ds. Clamped scores pass no gradient.
template <typename Scalar>
MlpGradients<Scalar> backward(const MlpCache<Scalar>& cache, const MlpParams<Scalar>& params,
                              const Vector<Scalar>& score_grad) {
  require(score_grad.size() == cache.scores.size(),
          "backward: upstream gradient has " + std::to_string(score_grad.size()) +
              " entries, forward produced " + std::to_string(cache.scores.size()));
  require(static_cast<Index>(cache.inputs.size()) == params.layers(),
          "backward: cache does not match parameters");
  MlpGradients<Scalar> grads{MlpParams<Scalar>::zeros(params.shape), {}};
  const Scalar eps = static_cast<Scalar>(kScoreEpsilon);

  Matrix<Scalar> dz(score_grad.size(), 1);
  for (Index i = 0; i < score_grad.size(); ++i) {
    const Scalar sig = logistic(cache.logits(i));
    const bool clamped = sig < eps || sig > Scalar(1) - eps;
    dz(i, 0) = clamped ? Scalar(0) : score_grad(i) * sig * (Scalar(1) - sig);
  }
  for (Index l = params.layers() - 1; l >= 0; --l) {
    const Matrix<Scalar>& input = cache.inputs[l];
    grads.params.weight(l).noalias() = dz.transpose() * input;
    grads.params.bias(l) = dz.colwise().sum().transpose();
    Matrix<Scalar> dh = dz * params.weight(l);
    if (l == 0) {
      grads.features = std::move(dh);
    } else {
      dz = dh.cwiseProduct((cache.pre[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
  }
  return grads;
}

struct SmootherConfig {
  bool enabled = false;
  Index window = 5;

  void validate() const;
};

/// Centered moving average over one video's snippet scores; near the edges
/// only in-range neighbours are averaged. Disabled config returns the input.
template <typename Derived>
Vector<typename Derived::Scalar> smooth_scores(const Eigen::MatrixBase<Derived>& scores,
                                               const SmootherConfig& cfg) {
  cfg.validate();
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out = scores;
  if (!cfg.enabled || cfg.window == 1) return out;
  const Index n = scores.size();
  const Index half = cfg.window / 2;
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - half);
    const Index hi = std::min<Index>(n - 1, i + half);
    out(i) = scores.segment(lo, hi - lo + 1).sum() / static_cast<Scalar>(hi - lo + 1);
  }
  return out;
}

}  // namespace lap
