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
#include <iosfwd>
#include <string>
#include <vector>

#include "lap/evaluate.hpp"
#include "lap/synthetic.hpp"
#include "lap/train.hpp"

namespace lap {

// Command implementations behind the `lap` executable. Each validates all
// inputs before creating any output, and writes files atomically.

struct GenSynthOptions {
  std::uint64_t seed = 0;
  SyntheticSpec spec;
  std::filesystem::path out_dir;
};

void cmd_gen_synth(const GenSynthOptions& options, std::ostream& out);

// Loads manifests, ground truth and the prompt dictionary named by `cfg`.
TrainData load_train_data(const TrainConfig& cfg);

// Writes train_log.csv, final.lapc/.json, best.lapc/.json,
// effective_config.json and summary.json under cfg.out_dir.
TrainResult cmd_train(const TrainConfig& cfg, std::ostream& out);

struct EvalCommandOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path manifest;
  std::filesystem::path ground_truth;
  std::filesystem::path report;         // optional JSON output file
  std::filesystem::path per_frame_csv;  // optional
  EvalOptions eval;
};

EvalReport cmd_eval(const EvalCommandOptions& options, std::ostream& out);

struct AblationRow {
  std::string name;
  bool feature_synthesis = false;
  bool mpl = false;
  bool pal = false;
  EvalReport report;  // final-epoch evaluation
};

// Baseline (visual-only MIL), +FS, +FS+MPL, +FS+MPL+PAL under one seed.
// Writes ablation.csv plus one training directory per row under cfg.out_dir.
std::vector<AblationRow> cmd_ablate(const TrainConfig& cfg, std::ostream& out);

struct InspectOptions {
  std::filesystem::path manifest;
  std::filesystem::path prompt_texts;
  std::filesystem::path prompt_embeddings;
  std::filesystem::path out_dir;
  Index length = 64;
};

// psi/<video_id>.csv (snippets x prompts), histogram.csv over abnormal-video
// snippets, videos.csv with each video's modal prompt.
std::vector<PromptCount> cmd_inspect_prompts(const InspectOptions& options, std::ostream& out);

}  // namespace lap
