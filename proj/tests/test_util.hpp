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

// Shared generators and guards for the unit and acceptance suites.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lap/losses.hpp"
#include "lap/model.hpp"

namespace lap::testing {

inline Matrix<double> random_matrix(Index rows, Index cols, std::mt19937_64& rng, double lo = -1.0,
                                    double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

inline Vector<double> random_vector(Index n, std::mt19937_64& rng, double lo = -1.0,
                                    double hi = 1.0) {
  return random_matrix(n, 1, rng, lo, hi);
}

inline MlpParams<double> random_params(const MlpShape& shape, std::mt19937_64& rng,
                                       double scale = 0.8) {
  auto p = MlpParams<double>::zeros(shape);
  for (auto& t : p.tensors) t = random_matrix(t.rows(), t.cols(), rng, -scale, scale);
  return p;
}

// One small bag for loss-level checks.
struct LapProblem {
  Index b = 2;
  Index length = 6;
  Vector<double> scores;     // 2bL
  Matrix<double> features;   // 2bL x d
  Vector<double> strength;   // bL
  Vector<double> labels;     // 2b
  LapLossConfig cfg;

  Index half() const { return b * length; }
};

inline LapProblem random_problem(std::mt19937_64& rng, Index dim = 4) {
  LapProblem p;
  p.cfg.mil.k = 2;
  p.cfg.mpl.set_size = 3;
  p.cfg.mpl.margin = 1.0;
  p.cfg.weights = {0.1, 0.001};
  p.scores = random_vector(2 * p.half(), rng, 0.05, 0.95);
  p.features = random_matrix(2 * p.half(), dim, rng, -0.5, 0.5);
  p.strength = random_vector(p.half(), rng, -0.2, 0.9);
  p.labels = Vector<double>(2 * p.b);
  p.labels << Vector<double>::Ones(p.b), Vector<double>::Zero(p.b);
  return p;
}

// Distance between the last selected and first unselected value when
// picking `count` extremes; infinity when the selection is the whole set.
inline double selection_gap(const Vector<double>& values, Index count, bool largest) {
  if (count >= values.size()) return std::numeric_limits<double>::infinity();
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  if (largest) std::reverse(sorted.begin(), sorted.end());
  return std::abs(sorted[count - 1] - sorted[count]);
}

// Smallest distance of the problem to any top-k tie, selection-set boundary
// or hinge point. Points closer than the finite-difference step are not safe.
inline double kink_distance(const Vector<double>& scores, const Matrix<double>& features,
                            const Vector<double>& strength, Index b, Index length,
                            const LapLossConfig& cfg) {
  const Index n = b * length;
  double gap = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < 2 * b; ++j) {
    gap = std::min(gap, selection_gap(scores.segment(j * length, length), cfg.mil.k, true));
  }
  const Index p = cfg.mpl.set_size;
  gap = std::min(gap, selection_gap(scores.head(n), p, false));
  gap = std::min(gap, selection_gap(scores.tail(n), p, false));
  gap = std::min(gap, selection_gap(strength, p, true));
  const auto sets = mpl_sets(Vector<double>(scores.tail(n)), Vector<double>(scores.head(n)),
                             strength, Matrix<double>(features.bottomRows(n)),
                             Matrix<double>(features.topRows(n)), p);
  const double arg = (sets.anchor - sets.positive).squaredNorm() -
                     (sets.anchor - sets.negative).squaredNorm() + cfg.mpl.margin;
  return std::min(gap, std::abs(arg));
}

// O(n^2) pairwise ROC AUC: P(pos > neg) + 0.5 P(pos == neg).
inline double auc_oracle(const Vector<double>& scores, const Eigen::VectorXi& labels) {
  double wins = 0, pairs = 0;
  for (Index i = 0; i < scores.size(); ++i) {
    if (labels(i) != 1) continue;
    for (Index j = 0; j < scores.size(); ++j) {
      if (labels(j) != 0) continue;
      pairs += 1;
      wins += scores(i) > scores(j) ? 1.0 : scores(i) == scores(j) ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

// Threshold sweep: at every distinct score t (descending) count predictions
// with score >= t and accumulate (R_t - R_prev) * P_t.
inline double ap_oracle(const Vector<double>& scores, const Eigen::VectorXi& labels) {
  std::vector<double> thresholds(scores.data(), scores.data() + scores.size());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const double positives = labels.sum();
  double ap = 0, prev_recall = 0;
  for (double t : thresholds) {
    double tp = 0, predicted = 0;
    for (Index i = 0; i < scores.size(); ++i) {
      if (scores(i) >= t) {
        predicted += 1;
        tp += labels(i);
      }
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / predicted);
    prev_recall = recall;
  }
  return ap;
}

struct MetricInstance {
  Vector<double> scores;
  Eigen::VectorXi labels;
};

// Random two-class instance of size [2, max_n]; every third instance uses
// coarse scores so tied groups are common.
inline MetricInstance random_metric_instance(std::mt19937_64& rng, int index, Index max_n = 2000) {
  std::uniform_int_distribution<Index> size(2, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MetricInstance m;
  const Index n = size(rng);
  m.scores.resize(n);
  m.labels.resize(n);
  const double rate = 0.05 + 0.9 * unit(rng);
  for (Index i = 0; i < n; ++i) {
    m.labels(i) = unit(rng) < rate ? 1 : 0;
    const double s = unit(rng) + 0.3 * m.labels(i);
    m.scores(i) = index % 3 == 0 ? std::round(s * 10.0) / 10.0 : s;
  }
  m.labels(0) = 1;
  m.labels(1) = 0;
  return m;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lap_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lap::testing
