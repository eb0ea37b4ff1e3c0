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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lap/checkpoint.hpp"
#include "lap/evaluate.hpp"
#include "lap/features.hpp"
#include "lap/losses.hpp"
#include "lap/optim.hpp"
#include "lap/prompts.hpp"

namespace lap {

struct TrainConfig {
  // Data locations (used by the command layer; train() takes loaded data).
  std::filesystem::path train_manifest;
  std::filesystem::path test_manifest;
  std::filesystem::path ground_truth;
  std::filesystem::path prompt_texts;
  std::filesystem::path prompt_embeddings;
  std::filesystem::path out_dir;

  FusionMode fusion = FusionMode::kConcat;
  bool visual_only = false;
  Index videos_per_bag = 32;  // b
  Index length = 64;          // L
  Index epochs = 50;
  std::uint64_t seed = 0;
  Index eval_every = 1;
  std::vector<Index> hidden = {512, 128};
  LapLossConfig loss;
  AdamConfig adam;
  SmootherConfig smoother;
  EvalOptions eval;
};

struct TrainData {
  std::vector<VideoFeatures> train;
  std::vector<VideoFeatures> test;
  FrameGroundTruth truth;
  PromptDictionary dictionary;
};

struct LogRow {
  Index epoch = 0;
  Index step = 0;  // optimizer steps taken so far
  double l_mil = 0, l_mpl = 0, l_pal = 0, l_lap = 0;  // epoch means
  std::optional<EvalReport> report;
};

struct TrainResult {
  ModelMeta meta;
  MlpParams<double> initial;
  MlpParams<double> final_params;
  MlpParams<double> best_params;
  Index best_epoch = 0;  // 0 when no evaluation ran
  std::optional<EvalReport> best_report;
  std::vector<LogRow> log;
};

// Throws on any precondition violation before training starts.
void validate(const TrainConfig& cfg, const TrainData& data);

/// Paired-bag training of the score predictor under L_MIL + beta L_MPL +
/// gamma L_PAL. Each epoch reshuffles both classes and draws b abnormal and
/// b normal videos per step without replacement.
TrainResult train(const TrainData& data, const TrainConfig& cfg,
                  const std::function<void(const LogRow&)>& on_epoch = {});

std::string log_header();
std::string log_to_csv(const std::vector<LogRow>& log);

}  // namespace lap
