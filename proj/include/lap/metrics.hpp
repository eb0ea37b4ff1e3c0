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

#include "lap/core.hpp"

namespace lap {

// Frame-level ranking metrics. Scores and labels are parallel arrays; labels
// are 0 (normal) or 1 (anomalous).

/// Area under the ROC curve with tied scores grouped into a single threshold
/// step, i.e. the Mann-Whitney statistic with half credit for ties.
/// Throws if either class is absent ("AUC undefined").
double roc_auc(const Eigen::Ref<const Vector<double>>& scores,
               const Eigen::Ref<const Eigen::VectorXi>& labels);

/// Non-interpolated average precision: sum over descending distinct score
/// thresholds of (R_n - R_{n-1}) * P_n. Throws if there are no positives.
double average_precision(const Eigen::Ref<const Vector<double>>& scores,
                         const Eigen::Ref<const Eigen::VectorXi>& labels);

/// FP / (FP + TN) where a frame alarms iff score > threshold.
/// Throws if there are no negatives.
double false_alarm_rate(const Eigen::Ref<const Vector<double>>& scores,
                        const Eigen::Ref<const Eigen::VectorXi>& labels, double threshold = 0.5);

}  // namespace lap
