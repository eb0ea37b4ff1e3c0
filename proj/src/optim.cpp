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

#include "lap/optim.hpp"

#include <algorithm>

namespace lap {

GradCheckReport grad_check(const std::function<double(const Vector<double>&)>& f,
                           const Vector<double>& point, const Vector<double>& analytic,
                           const GradCheckOptions& options) {
  require(point.size() == analytic.size(), "grad_check: gradient size does not match point");
  require(options.step > 0, "grad_check: step must be positive");
  const double h = options.step;
  GradCheckReport report;
  Vector<double> x = point;
  auto eval = [&](Index i, double offset) {
    x(i) = point(i) + offset;
    const double v = f(x);
    x(i) = point(i);
    if (!std::isfinite(v)) {
      throw Error("grad_check: non-finite function value at coordinate " + std::to_string(i));
    }
    return v;
  };
  const double f0 = f(point);
  require(std::isfinite(f0), "grad_check: non-finite function value at the probe point");

  for (Index i = 0; i < point.size(); ++i) {
    const double up = eval(i, h);
    const double down = eval(i, -h);
    const double up_half = eval(i, h / 2);
    const double down_half = eval(i, -h / 2);
    const double central = (up - down) / (2 * h);
    const double central_half = (up_half - down_half) / h;
    const double forward = (up - f0) / h;
    const double backward = (f0 - down) / h;

    const double slope = std::max({std::abs(forward), std::abs(backward), options.scale_floor});
    const bool one_sided_break = std::abs(forward - backward) > options.kink_tolerance * slope;
    const bool halving_break = std::abs(central - central_half) >
                               0.1 * options.kink_tolerance *
                                   std::max(std::abs(central), options.scale_floor);
    if (one_sided_break || halving_break) {
      report.kink_coordinates.push_back(i);
      continue;
    }
    const double a = analytic(i);
    const double abs_err = std::abs(a - central);
    const double rel_err = abs_err / std::max({std::abs(a), std::abs(central), options.scale_floor});
    report.max_absolute_error = std::max(report.max_absolute_error, abs_err);
    if (rel_err > report.max_relative_error || report.worst_coordinate < 0) {
      report.max_relative_error = std::max(report.max_relative_error, rel_err);
      report.worst_coordinate = i;
    }
  }
  return report;
}

}  // namespace lap
