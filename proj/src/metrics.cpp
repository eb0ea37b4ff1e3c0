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

#include "lap/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace lap {
namespace {

void check_inputs(const Eigen::Ref<const Vector<double>>& scores,
                  const Eigen::Ref<const Eigen::VectorXi>& labels, const char* name) {
  require(scores.size() == labels.size(),
          std::string(name) + ": " + std::to_string(scores.size()) + " scores vs " +
              std::to_string(labels.size()) + " labels");
  require(scores.allFinite(), std::string(name) + ": non-finite score");
}

// Indices sorted by descending score.
std::vector<Index> descending_order(const Eigen::Ref<const Vector<double>>& scores) {
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  return order;
}

}  // namespace

double roc_auc(const Eigen::Ref<const Vector<double>>& scores,
               const Eigen::Ref<const Eigen::VectorXi>& labels) {
  check_inputs(scores, labels, "roc_auc");
  const auto order = descending_order(scores);
  double positives = 0, negatives = 0;
  for (Index i = 0; i < labels.size(); ++i) (labels(i) ? positives : negatives) += 1;
  require(positives > 0 && negatives > 0, "roc_auc: AUC undefined for single-class input");

  // Walk thresholds from high to low; each group of tied scores contributes
  // one trapezoid.
  double area = 0, tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    double group_tp = 0, group_fp = 0;
    const double s = scores(order[i]);
    for (; i < order.size() && scores(order[i]) == s; ++i) {
      (labels(order[i]) ? group_tp : group_fp) += 1;
    }
    area += group_fp * (tp + 0.5 * group_tp);
    tp += group_tp;
    fp += group_fp;
  }
  return area / (positives * negatives);
}

double average_precision(const Eigen::Ref<const Vector<double>>& scores,
                         const Eigen::Ref<const Eigen::VectorXi>& labels) {
  check_inputs(scores, labels, "average_precision");
  const double positives = static_cast<double>((labels.array() != 0).count());
  require(positives > 0, "average_precision: no positive labels");
  const auto order = descending_order(scores);
  double ap = 0, tp = 0, seen = 0, prev_recall = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores(order[i]);
    for (; i < order.size() && scores(order[i]) == s; ++i) {
      tp += labels(order[i]) ? 1 : 0;
      seen += 1;
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / seen);
    prev_recall = recall;
  }
  return ap;
}

double false_alarm_rate(const Eigen::Ref<const Vector<double>>& scores,
                        const Eigen::Ref<const Eigen::VectorXi>& labels, double threshold) {
  check_inputs(scores, labels, "false_alarm_rate");
  double negatives = 0, false_alarms = 0;
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels(i)) continue;
    negatives += 1;
    false_alarms += scores(i) > threshold ? 1 : 0;
  }
  require(negatives > 0, "false_alarm_rate: no negative frames");
  return false_alarms / negatives;
}

}  // namespace lap
