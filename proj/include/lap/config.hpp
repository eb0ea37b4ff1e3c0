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

#include <filesystem>
#include <string>

#include "json.hpp"
#include "lap/train.hpp"

namespace lap {

// Run configuration is a flat JSON object whose keys mirror the CLI flags:
//
//   train_manifest, test_manifest, ground_truth,   paths, relative to the
//   prompt_texts, prompt_embeddings, out_dir       config file's directory
//   fusion            "concat" | "add"
//   visual_only       bool, zero the semantic input (visual-only baseline)
//   k, alpha, beta, gamma, tau, set_size (0 = P)
//   threshold_mode    "dynamic" | "static";  static_threshold
//   b, L, epochs, seed, eval_every, lr, weight_decay, hidden ([512, 128])
//   smoother, smoother_window, far_threshold
//
// Unknown keys are rejected. Precedence: flags > file > LAP_SEED (seed
// only) > built-in defaults.

nlohmann::json default_config_json();

// Reads a config file and resolves its relative paths against its directory.
nlohmann::json read_config_file(const std::filesystem::path& path);

// Later layers override earlier ones key by key; unknown keys throw.
nlohmann::json merge_config(const nlohmann::json& base, const nlohmann::json& overrides);

TrainConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const TrainConfig& cfg);

// Builds the effective configuration: defaults, then the optional file, then
// LAP_SEED when no seed was given, then flag overrides.
TrainConfig resolve_config(const std::filesystem::path& config_file,
                           const nlohmann::json& flag_overrides);

// Recommended run config for a generated synthetic directory (relative paths).
std::string synthetic_config_json(std::uint64_t seed);

}  // namespace lap
