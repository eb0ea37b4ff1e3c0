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
#include <functional>
#include <string>
#include <vector>

#include "lap/core.hpp"

namespace lap {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.005;  // L2 term added to the gradient
};

template <typename Scalar>
struct AdamState {
  std::vector<Matrix<Scalar>> first_moment;
  std::vector<Matrix<Scalar>> second_moment;
  std::int64_t step = 0;

  static AdamState like(const std::vector<Matrix<Scalar>>& params) {
    AdamState s;
    for (const auto& p : params) {
      s.first_moment.push_back(Matrix<Scalar>::Zero(p.rows(), p.cols()));
      s.second_moment.push_back(Matrix<Scalar>::Zero(p.rows(), p.cols()));
    }
    return s;
  }
};

/// Bias-corrected Adam with classic L2 weight decay (g += wd * w before the
/// moment updates). Non-finite gradients reject the step before anything is
/// modified.
template <typename Scalar>
void adam_step(std::vector<Matrix<Scalar>>& params, const std::vector<Matrix<Scalar>>& grads,
               AdamState<Scalar>& state, const AdamConfig& cfg) {
  require(params.size() == grads.size() && params.size() == state.first_moment.size() &&
              params.size() == state.second_moment.size(),
          "adam: tensor count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].rows() == grads[i].rows() && params[i].cols() == grads[i].cols() &&
                params[i].rows() == state.first_moment[i].rows() &&
                params[i].cols() == state.first_moment[i].cols(),
            "adam: shape mismatch in tensor " + std::to_string(i));
    require(grads[i].allFinite(), "adam: non-finite gradient in tensor " + std::to_string(i) +
                                      ", step rejected");
  }
  ++state.step;
  const Scalar b1 = static_cast<Scalar>(cfg.beta1);
  const Scalar b2 = static_cast<Scalar>(cfg.beta2);
  const Scalar correction1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar correction2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar eps = static_cast<Scalar>(cfg.epsilon);
  const Scalar wd = static_cast<Scalar>(cfg.weight_decay);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix<Scalar> g = grads[i] + wd * params[i];
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
    params[i].array() -=
        lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  }
}

struct GradCheckOptions {
  double step = 1e-4;
  // Denominator floor for the relative error |a - n| / max(|a|, |n|, floor).
  double scale_floor = 1e-6;
  // A coordinate is treated as sitting on a kink when its one-sided
  // differences disagree by more than this fraction of the slope, or the
  // central estimates at h and h/2 disagree by more than kink_tolerance / 10.
  double kink_tolerance = 0.05;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  Index worst_coordinate = -1;
  std::vector<Index> kink_coordinates;  // excluded from the maxima

  bool reliable() const { return kink_coordinates.empty(); }
};

/// Central-difference comparison of `analytic` against f at `point`.
GradCheckReport grad_check(const std::function<double(const Vector<double>&)>& f,
                           const Vector<double>& point, const Vector<double>& analytic,
                           const GradCheckOptions& options = {});

}  // namespace lap
