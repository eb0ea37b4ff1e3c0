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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lap/core.hpp"

namespace lap {

struct MilConfig {
  Index k = 3;
};

struct MplConfig {
  double margin = 1.0;  // alpha
  Index set_size = 0;   // 0: use the prompt dictionary capacity P
};

enum class ThresholdMode { kDynamic, kStatic };

std::string to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(const std::string& name);

struct PalConfig {
  double tau = 1.0;
  ThresholdMode mode = ThresholdMode::kDynamic;
  double static_threshold = 0.5;
};

struct LossWeights {
  double beta = 0.1;
  double gamma = 0.001;
};

struct LapLossConfig {
  MilConfig mil;
  MplConfig mpl;
  PalConfig pal;
  LossWeights weights;
};

/// Indices of the `count` largest (or smallest) entries; ties go to the
/// smaller index. Returned in selection order.
template <typename Derived>
std::vector<Index> select_extreme(const Eigen::MatrixBase<Derived>& values, Index count,
                                  bool largest) {
  require(count >= 0 && count <= values.size(), "select_extreme: count out of range");
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + count, order.end(), [&](Index a, Index b) {
    if (values(a) != values(b)) return largest ? values(a) > values(b) : values(a) < values(b);
    return a < b;
  });
  order.resize(count);
  return order;
}

template <typename Scalar>
struct LossValue {
  Scalar value{0};
  Vector<Scalar> grad;
};

// ---------------------------------------------------------------------------
// MIL: top-k mean per video, binary cross-entropy against video labels.

template <typename Scalar>
struct MilPredictions {
  Vector<Scalar> video_scores;                 // y_hat, one per video
  std::vector<std::vector<Index>> selected;    // absolute score indices per video
};

template <typename Derived>
MilPredictions<typename Derived::Scalar> mil_predictions(const Eigen::MatrixBase<Derived>& scores,
                                                         Index videos_per_bag, Index length,
                                                         Index k) {
  using Scalar = typename Derived::Scalar;
  require(k >= 1 && k <= length,
          "mil: k=" + std::to_string(k) + " must lie in [1, L=" + std::to_string(length) + "]");
  require(scores.size() == 2 * videos_per_bag * length,
          "mil: expected " + std::to_string(2 * videos_per_bag * length) + " scores, got " +
              std::to_string(scores.size()));
  MilPredictions<Scalar> out;
  const Index videos = 2 * videos_per_bag;
  out.video_scores.resize(videos);
  out.selected.resize(videos);
  for (Index j = 0; j < videos; ++j) {
    const auto slice = scores.segment(j * length, length);
    auto top = select_extreme(slice, k, true);
    Scalar sum{0};
    for (Index& i : top) {
      sum += slice(i);
      i += j * length;
    }
    out.video_scores(j) = sum / static_cast<Scalar>(k);
    out.selected[j] = std::move(top);
  }
  return out;
}

template <typename Scalar>
Scalar bce(Scalar prediction, Scalar target) {
  return -(target * std::log(prediction) + (Scalar(1) - target) * std::log(Scalar(1) - prediction));
}

template <typename Scalar>
Scalar bce_grad(Scalar prediction, Scalar target) {
  return (prediction - target) / (prediction * (Scalar(1) - prediction));
}

/// Summed binary cross-entropy; gradient is with respect to the predictions.
template <typename DerivedP, typename DerivedT>
LossValue<typename DerivedP::Scalar> summed_bce(const Eigen::MatrixBase<DerivedP>& predictions,
                                                const Eigen::MatrixBase<DerivedT>& targets) {
  using Scalar = typename DerivedP::Scalar;
  require(predictions.size() == targets.size(),
          "bce: " + std::to_string(predictions.size()) + " predictions vs " +
              std::to_string(targets.size()) + " targets");
  LossValue<Scalar> out;
  out.grad.resize(predictions.size());
  for (Index i = 0; i < predictions.size(); ++i) {
    const Scalar t = static_cast<Scalar>(targets(i));
    out.value += bce(predictions(i), t);
    out.grad(i) = bce_grad(predictions(i), t);
  }
  return out;
}

template <typename DerivedP, typename DerivedT>
LossValue<typename DerivedP::Scalar> mil_loss(const Eigen::MatrixBase<DerivedP>& video_scores,
                                              const Eigen::MatrixBase<DerivedT>& video_labels) {
  return summed_bce(video_scores, video_labels);
}

// ---------------------------------------------------------------------------
// MPL: triplet over the means of selected fused-feature rows.

template <typename Scalar>
struct MplSets {
  Vector<Scalar> anchor;    // mean F_n over the P lowest normal scores
  Vector<Scalar> positive;  // mean F_a over the P lowest abnormal scores
  Vector<Scalar> negative;  // mean F_a over the P largest anomaly strengths
  std::vector<Index> anchor_rows, positive_rows, negative_rows;
};

template <typename DSN, typename DSA, typename DC, typename DFN, typename DFA>
MplSets<typename DFN::Scalar> mpl_sets(const Eigen::MatrixBase<DSN>& normal_scores,
                                       const Eigen::MatrixBase<DSA>& abnormal_scores,
                                       const Eigen::MatrixBase<DC>& strength,
                                       const Eigen::MatrixBase<DFN>& normal_features,
                                       const Eigen::MatrixBase<DFA>& abnormal_features,
                                       Index set_size) {
  using Scalar = typename DFN::Scalar;
  const Index n = abnormal_scores.size();
  require(normal_scores.size() == n && strength.size() == n && normal_features.rows() == n &&
              abnormal_features.rows() == n,
          "mpl: inconsistent bag half sizes");
  require(normal_features.cols() == abnormal_features.cols(), "mpl: feature widths differ");
  require(set_size >= 1 && set_size <= n,
          "mpl: set size P=" + std::to_string(set_size) + " must lie in [1, N=" +
              std::to_string(n) + "]");
  MplSets<Scalar> sets;
  sets.anchor_rows = select_extreme(normal_scores, set_size, false);
  sets.positive_rows = select_extreme(abnormal_scores, set_size, false);
  sets.negative_rows = select_extreme(strength, set_size, true);
  auto mean_rows = [&](const auto& features, const std::vector<Index>& rows) {
    Vector<Scalar> m = Vector<Scalar>::Zero(features.cols());
    for (Index r : rows) m += features.row(r).transpose();
    return Vector<Scalar>(m / static_cast<Scalar>(rows.size()));
  };
  sets.anchor = mean_rows(normal_features, sets.anchor_rows);
  sets.positive = mean_rows(abnormal_features, sets.positive_rows);
  sets.negative = mean_rows(abnormal_features, sets.negative_rows);
  return sets;
}

template <typename Scalar>
struct TripletLoss {
  Scalar value{0};
  bool active = false;
  Vector<Scalar> grad_anchor, grad_positive, grad_negative;
};

/// max(|a - p|^2 - |a - n|^2 + margin, 0). At the hinge point the zero
/// branch is taken, so gradients are exactly zero whenever value == 0.
template <typename Scalar>
TripletLoss<Scalar> mpl_loss(const Vector<Scalar>& anchor, const Vector<Scalar>& positive,
                             const Vector<Scalar>& negative, Scalar margin) {
  require(anchor.size() == positive.size() && anchor.size() == negative.size(),
          "mpl_loss: dimension mismatch");
  TripletLoss<Scalar> out;
  const Vector<Scalar> d_pos = anchor - positive;
  const Vector<Scalar> d_neg = anchor - negative;
  const Scalar arg = d_pos.squaredNorm() - d_neg.squaredNorm() + margin;
  out.active = arg > Scalar(0);
  out.grad_anchor = Vector<Scalar>::Zero(anchor.size());
  out.grad_positive = Vector<Scalar>::Zero(anchor.size());
  out.grad_negative = Vector<Scalar>::Zero(anchor.size());
  if (out.active) {
    out.value = arg;
    out.grad_anchor = Scalar(2) * (d_pos - d_neg);
    out.grad_positive = Scalar(-2) * d_pos;
    out.grad_negative = Scalar(2) * d_neg;
  }
  return out;
}

// ---------------------------------------------------------------------------
// PAL: batch-dynamic threshold on anomaly strength, supervised BCE.

template <typename Scalar>
struct PseudoLabels {
  Eigen::VectorXi labels;
  Scalar threshold{0};
};

/// Dynamic mode: threshold = mean(c) + tau * std(c), population std.
/// Static mode: fixed threshold. A snippet is labelled 1 iff c > threshold.
template <typename Derived>
PseudoLabels<typename Derived::Scalar> pal_labels(const Eigen::MatrixBase<Derived>& strength,
                                                  const PalConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  require(strength.size() >= 2, "pal: need at least 2 snippets for a dynamic threshold");
  PseudoLabels<Scalar> out;
  if (cfg.mode == ThresholdMode::kDynamic) {
    const Scalar mean = strength.mean();
    const Scalar var = (strength.array() - mean).square().mean();
    out.threshold = mean + static_cast<Scalar>(cfg.tau) * std::sqrt(var);
  } else {
    out.threshold = static_cast<Scalar>(cfg.static_threshold);
  }
  out.labels = (strength.array() > out.threshold).template cast<int>();
  return out;
}

template <typename DerivedS>
LossValue<typename DerivedS::Scalar> pal_loss(const Eigen::MatrixBase<DerivedS>& abnormal_scores,
                                              const Eigen::VectorXi& labels) {
  require(abnormal_scores.size() == labels.size(),
          "pal_loss: " + std::to_string(abnormal_scores.size()) + " scores vs " +
              std::to_string(labels.size()) + " labels");
  return summed_bce(abnormal_scores, labels);
}

// ---------------------------------------------------------------------------
// Combined objective.

template <typename Scalar>
struct LapLoss {
  Scalar mil{0}, mpl{0}, pal{0}, total{0};
  Vector<Scalar> grad_scores;    // 2N, bag layout [abnormal; normal]
  Matrix<Scalar> grad_features;  // 2N x d_f
  MilPredictions<Scalar> predictions;
  MplSets<Scalar> sets;
  PseudoLabels<Scalar> pseudo;
};

/// L_MIL + beta * L_MPL + gamma * L_PAL over one bag. `scores` and
/// `features` follow the bag layout (abnormal half first); `strength` is the
/// anomaly vector of the abnormal half. Selections, pseudo labels and the
/// strength vector are constants of the step: no gradient flows through them.
template <typename DS, typename DF, typename DC, typename DY>
LapLoss<typename DS::Scalar> lap_loss(const Eigen::MatrixBase<DS>& scores,
                                      const Eigen::MatrixBase<DF>& features,
                                      const Eigen::MatrixBase<DC>& strength,
                                      const Eigen::MatrixBase<DY>& video_labels,
                                      Index videos_per_bag, Index length,
                                      const LapLossConfig& cfg) {
  using Scalar = typename DS::Scalar;
  const Index n = videos_per_bag * length;
  require(features.rows() == 2 * n, "lap_loss: feature rows do not match the bag");
  require(strength.size() == n, "lap_loss: anomaly vector must cover the abnormal half");
  require(video_labels.size() == 2 * videos_per_bag, "lap_loss: one label per video expected");
  require(cfg.weights.beta >= 0 && cfg.weights.gamma >= 0, "lap_loss: weights must be nonnegative");
  require(cfg.mpl.margin >= 0, "lap_loss: margin must be nonnegative");

  LapLoss<Scalar> out;
  out.grad_scores = Vector<Scalar>::Zero(2 * n);
  out.grad_features = Matrix<Scalar>::Zero(2 * n, features.cols());

  out.predictions = mil_predictions(scores, videos_per_bag, length, cfg.mil.k);
  const auto mil = mil_loss(out.predictions.video_scores, video_labels.template cast<Scalar>());
  out.mil = mil.value;
  const Scalar inv_k = Scalar(1) / static_cast<Scalar>(cfg.mil.k);
  for (std::size_t j = 0; j < out.predictions.selected.size(); ++j) {
    for (Index i : out.predictions.selected[j]) out.grad_scores(i) += mil.grad(j) * inv_k;
  }

  const auto abnormal_scores = scores.head(n);
  const auto normal_scores = scores.tail(n);
  const auto abnormal_features = features.topRows(n);
  const auto normal_features = features.bottomRows(n);

  const Index set_size = cfg.mpl.set_size;
  out.sets = mpl_sets(normal_scores, abnormal_scores, strength, normal_features, abnormal_features,
                      set_size);
  const auto triplet = mpl_loss<Scalar>(out.sets.anchor, out.sets.positive, out.sets.negative,
                                        static_cast<Scalar>(cfg.mpl.margin));
  out.mpl = triplet.value;

  out.pseudo = pal_labels(strength, cfg.pal);
  const auto pal = pal_loss(abnormal_scores, out.pseudo.labels);
  out.pal = pal.value;

  const Scalar beta = static_cast<Scalar>(cfg.weights.beta);
  const Scalar gamma = static_cast<Scalar>(cfg.weights.gamma);
  out.total = out.mil;
  if (beta != Scalar(0)) {
    out.total += beta * out.mpl;
    if (triplet.active) {
      const Scalar w = beta / static_cast<Scalar>(set_size);
      for (Index r : out.sets.anchor_rows)
        out.grad_features.row(n + r) += w * triplet.grad_anchor.transpose();
      for (Index r : out.sets.positive_rows)
        out.grad_features.row(r) += w * triplet.grad_positive.transpose();
      for (Index r : out.sets.negative_rows)
        out.grad_features.row(r) += w * triplet.grad_negative.transpose();
    }
  }
  if (gamma != Scalar(0)) {
    out.total += gamma * out.pal;
    out.grad_scores.head(n) += gamma * pal.grad;
  }
  return out;
}

}  // namespace lap
