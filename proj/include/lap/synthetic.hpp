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
#include <string>
#include <vector>

#include "lap/features.hpp"
#include "lap/prompts.hpp"

namespace lap {

// Planted-anomaly testbed. Normal snippets scatter around a shared visual
// centre and a shared caption centre. Each abnormal video carries one
// contiguous window whose caption rows are noisy copies of a single prompt
// embedding and whose visual rows are shifted by that prompt's class offset.
// Every snippet of an abnormal video additionally carries a video-level
// visual "scene" offset, a confounder that separates abnormal from normal
// videos without localizing the anomaly.
struct SyntheticSpec {
  Index n_abnormal = 32;       // training videos per label
  Index n_normal = 32;
  Index n_test_abnormal = 16;
  Index n_test_normal = 16;
  Index visual_dim = 32;
  Index semantic_dim = 32;
  Index prompts = 8;
  double sigma = 0.1;          // caption noise inside the window, per component
  double caption_spread = 1.0; // caption noise of normal snippets
  double visual_noise = 1.0;
  double visual_shift = 2.0;   // norm of each class's visual offset
  double scene_shift = 6.0;    // norm of the abnormal-video scene offset
  Index min_snippets = 40;
  Index max_snippets = 96;
  double anomaly_fraction = 0.3;
  Index frames_per_snippet = kFramesPerSnippet;

  void validate() const;
};

struct SyntheticDataset {
  std::vector<VideoFeatures> train;
  std::vector<VideoFeatures> test;
  PromptDictionary dictionary;
  FrameGroundTruth truth;
  // Planted prompt per abnormal video (video_id -> prompt index) and the
  // planted snippet window [begin, end) in raw snippet units.
  std::map<std::string, Index> planted_prompt;
  std::map<std::string, std::pair<Index, Index>> planted_window;
};

SyntheticDataset gen_synthetic(std::uint64_t seed, const SyntheticSpec& spec);

// Layout written under `dir`:
//   features/<video_id>_{visual,semantic}.lapf
//   train_manifest.json, test_manifest.json, ground_truth.json
//   prompts.txt, prompts.lapf, synthetic_spec.json, config.json
void write_synthetic(const SyntheticDataset& data, const SyntheticSpec& spec, std::uint64_t seed,
                     const std::filesystem::path& dir);

std::string spec_to_json(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace lap
