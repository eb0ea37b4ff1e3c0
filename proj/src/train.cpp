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

#include "lap/train.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

namespace lap {
namespace {

constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ull;

std::string format_metric(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void validate(const TrainConfig& cfg, const TrainData& data) {
  require(cfg.videos_per_bag >= 1, "b must be >= 1");
  require(cfg.length >= 1, "L must be >= 1");
  require(cfg.epochs >= 1, "epochs must be >= 1");
  require(cfg.eval_every >= 1, "eval_every must be >= 1");
  require(cfg.loss.mil.k >= 1 && cfg.loss.mil.k <= cfg.length,
          "k=" + std::to_string(cfg.loss.mil.k) + " must lie in [1, L=" +
              std::to_string(cfg.length) + "]");
  require(cfg.loss.mpl.margin >= 0, "alpha must be nonnegative");
  require(cfg.loss.weights.beta >= 0 && cfg.loss.weights.gamma >= 0,
          "beta and gamma must be nonnegative");
  require(std::isfinite(cfg.loss.pal.tau), "tau must be finite");
  require(cfg.adam.learning_rate >= 0 && cfg.adam.weight_decay >= 0,
          "lr and weight_decay must be nonnegative");
  cfg.smoother.validate();
  for (Index w : cfg.hidden) require(w >= 1, "hidden widths must be positive");

  std::size_t abnormal = 0, normal = 0;
  for (const auto& v : data.train) (v.label ? abnormal : normal) += 1;
  require(abnormal >= 1, "training split has no abnormal videos");
  require(normal >= 1, "training split has no normal videos");
  require(abnormal >= static_cast<std::size_t>(cfg.videos_per_bag) &&
              normal >= static_cast<std::size_t>(cfg.videos_per_bag),
          "b=" + std::to_string(cfg.videos_per_bag) + " exceeds the available videos (" +
              std::to_string(abnormal) + " abnormal, " + std::to_string(normal) + " normal)");

  const Index d_v = data.train.front().visual.cols();
  const Index d_t = data.train.front().semantic.cols();
  for (const auto* split : {&data.train, &data.test}) {
    for (const auto& v : *split) {
      require(v.visual.cols() == d_v && v.semantic.cols() == d_t,
              "video '" + v.video_id + "': feature dimensions differ from the training set");
    }
  }
  FusionConfig{cfg.fusion, d_v, d_t}.validate();
  require(data.dictionary.size() >= 1, "prompt dictionary is empty");
  require(data.dictionary.dim() == d_t,
          "prompt embeddings have d_t=" + std::to_string(data.dictionary.dim()) +
              " but semantic features have d_t=" + std::to_string(d_t));
  const Index set_size = cfg.loss.mpl.set_size > 0 ? cfg.loss.mpl.set_size : data.dictionary.size();
  require(set_size <= cfg.videos_per_bag * cfg.length,
          "set_size P=" + std::to_string(set_size) + " exceeds N=b*L=" +
              std::to_string(cfg.videos_per_bag * cfg.length));
}

TrainResult train(const TrainData& data, const TrainConfig& cfg,
                  const std::function<void(const LogRow&)>& on_epoch) {
  validate(cfg, data);
  const Index b = cfg.videos_per_bag;
  const Index length = cfg.length;

  std::vector<VideoFeatures> abnormal, normal, test;
  for (const auto& v : data.train) {
    (v.label ? abnormal : normal).push_back(resample_to_length(v, length));
  }
  for (const auto& v : data.test) test.push_back(resample_to_length(v, length));

  TrainResult result;
  result.meta.fusion = {cfg.fusion, abnormal.front().visual.cols(), abnormal.front().semantic.cols()};
  result.meta.shape = {result.meta.fusion.fused_dim(), cfg.hidden};
  result.meta.length = length;
  result.meta.smoother = cfg.smoother;
  result.meta.visual_only = cfg.visual_only;

  LapLossConfig loss_cfg = cfg.loss;
  if (loss_cfg.mpl.set_size == 0) loss_cfg.mpl.set_size = data.dictionary.size();

  MlpParams<double> params = init_mlp<double>(result.meta.shape, cfg.seed);
  result.initial = params;
  result.best_params = params;
  auto adam = AdamState<double>::like(params.tensors);
  std::mt19937_64 shuffle_rng(cfg.seed ^ kShuffleStream);

  std::vector<std::size_t> abnormal_order(abnormal.size()), normal_order(normal.size());
  const Index steps_per_epoch = static_cast<Index>(std::min(abnormal.size(), normal.size())) / b;
  Index global_step = 0;
  std::optional<double> best_auc;
  MlpCache<double> cache;

  for (Index epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(abnormal_order.begin(), abnormal_order.end(), 0);
    std::iota(normal_order.begin(), normal_order.end(), 0);
    std::shuffle(abnormal_order.begin(), abnormal_order.end(), shuffle_rng);
    std::shuffle(normal_order.begin(), normal_order.end(), shuffle_rng);

    LogRow row;
    row.epoch = epoch;
    for (Index step = 0; step < steps_per_epoch; ++step) {
      std::vector<VideoFeatures> bag_abnormal, bag_normal;
      for (Index j = 0; j < b; ++j) {
        bag_abnormal.push_back(abnormal[abnormal_order[step * b + j]]);
        bag_normal.push_back(normal[normal_order[step * b + j]]);
      }
      const FeatureBag bag = make_bag(bag_abnormal, bag_normal, length);
      const Matrix<double> fused =
          cfg.visual_only
              ? fuse(bag.visual, Matrix<double>::Zero(bag.semantic.rows(), bag.semantic.cols()),
                     result.meta.fusion)
              : fuse(bag.visual, bag.semantic, result.meta.fusion);
      const Vector<double> strength =
          anomaly_vector(anomaly_matrix(bag.abnormal_semantic(), data.dictionary)).strength;

      const Vector<double> scores = forward(fused, params, &cache);
      const auto loss = lap_loss(scores, fused, strength, bag.video_labels, b, length, loss_cfg);
      require(std::isfinite(loss.total), "non-finite training loss at epoch " +
                                             std::to_string(epoch));
      // The fused features carry no parameters, so only the score path
      // reaches the predictor.
      const auto grads = backward(cache, params, loss.grad_scores);
      adam_step(params.tensors, grads.params.tensors, adam, cfg.adam);
      ++global_step;

      row.l_mil += loss.mil;
      row.l_mpl += loss.mpl;
      row.l_pal += loss.pal;
      row.l_lap += loss.total;
    }
    if (steps_per_epoch > 0) {
      const double inv = 1.0 / static_cast<double>(steps_per_epoch);
      row.l_mil *= inv;
      row.l_mpl *= inv;
      row.l_pal *= inv;
      row.l_lap *= inv;
    }
    row.step = global_step;

    if (!test.empty() && (epoch % cfg.eval_every == 0 || epoch == cfg.epochs)) {
      const auto frames = score_frames(params, result.meta, test, data.truth);
      row.report = evaluate_frames(frames, cfg.eval);
      const auto& auc = row.report->auc_all;
      if (auc && (!best_auc || *auc > *best_auc)) {
        best_auc = auc;
        result.best_epoch = epoch;
        result.best_params = params;
        result.best_report = row.report;
      }
    }
    if (on_epoch) on_epoch(row);
    result.log.push_back(std::move(row));
  }
  result.final_params = std::move(params);
  if (result.best_epoch == 0) result.best_params = result.final_params;
  return result;
}

std::string log_header() {
  return "epoch,step,l_mil,l_mpl,l_pal,l_lap,auc_all,auc_abn,ap,far_all,far_abn";
}

std::string log_to_csv(const std::vector<LogRow>& log) {
  std::ostringstream out;
  out << log_header() << '\n';
  for (const auto& row : log) {
    out << row.epoch << ',' << row.step << ',' << format_value(row.l_mil) << ','
        << format_value(row.l_mpl) << ',' << format_value(row.l_pal) << ','
        << format_value(row.l_lap);
    if (row.report) {
      const auto& r = *row.report;
      out << ',' << format_metric(r.auc_all) << ',' << format_metric(r.auc_abn) << ','
          << format_metric(r.ap) << ',' << format_metric(r.far_all) << ','
          << format_metric(r.far_abn);
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace lap
