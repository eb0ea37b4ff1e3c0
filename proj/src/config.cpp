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

#include "lap/config.hpp"

#include <cstdlib>

#include "lap/feature_file.hpp"

namespace lap {
namespace {

using nlohmann::json;

constexpr const char* kPathKeys[] = {"train_manifest", "test_manifest",     "ground_truth",
                                     "prompt_texts",   "prompt_embeddings", "out_dir"};

template <typename T>
T get(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("config key '") + key + "' is missing or has the wrong type");
  }
}

}  // namespace

json default_config_json() {
  return config_to_json(TrainConfig{});
}

json config_to_json(const TrainConfig& cfg) {
  return {{"train_manifest", cfg.train_manifest.generic_string()},
          {"test_manifest", cfg.test_manifest.generic_string()},
          {"ground_truth", cfg.ground_truth.generic_string()},
          {"prompt_texts", cfg.prompt_texts.generic_string()},
          {"prompt_embeddings", cfg.prompt_embeddings.generic_string()},
          {"out_dir", cfg.out_dir.generic_string()},
          {"fusion", to_string(cfg.fusion)},
          {"visual_only", cfg.visual_only},
          {"k", cfg.loss.mil.k},
          {"alpha", cfg.loss.mpl.margin},
          {"beta", cfg.loss.weights.beta},
          {"gamma", cfg.loss.weights.gamma},
          {"tau", cfg.loss.pal.tau},
          {"set_size", cfg.loss.mpl.set_size},
          {"threshold_mode", to_string(cfg.loss.pal.mode)},
          {"static_threshold", cfg.loss.pal.static_threshold},
          {"b", cfg.videos_per_bag},
          {"L", cfg.length},
          {"epochs", cfg.epochs},
          {"seed", cfg.seed},
          {"eval_every", cfg.eval_every},
          {"lr", cfg.adam.learning_rate},
          {"weight_decay", cfg.adam.weight_decay},
          {"hidden", cfg.hidden},
          {"smoother", cfg.smoother.enabled},
          {"smoother_window", cfg.smoother.window},
          {"far_threshold", cfg.eval.far_threshold}};
}

TrainConfig config_from_json(const json& doc) {
  require(doc.is_object(), "config must be a JSON object");
  TrainConfig cfg;
  cfg.train_manifest = get<std::string>(doc, "train_manifest");
  cfg.test_manifest = get<std::string>(doc, "test_manifest");
  cfg.ground_truth = get<std::string>(doc, "ground_truth");
  cfg.prompt_texts = get<std::string>(doc, "prompt_texts");
  cfg.prompt_embeddings = get<std::string>(doc, "prompt_embeddings");
  cfg.out_dir = get<std::string>(doc, "out_dir");
  cfg.fusion = parse_fusion_mode(get<std::string>(doc, "fusion"));
  cfg.visual_only = get<bool>(doc, "visual_only");
  cfg.loss.mil.k = get<Index>(doc, "k");
  cfg.loss.mpl.margin = get<double>(doc, "alpha");
  cfg.loss.weights.beta = get<double>(doc, "beta");
  cfg.loss.weights.gamma = get<double>(doc, "gamma");
  cfg.loss.pal.tau = get<double>(doc, "tau");
  cfg.loss.mpl.set_size = get<Index>(doc, "set_size");
  cfg.loss.pal.mode = parse_threshold_mode(get<std::string>(doc, "threshold_mode"));
  cfg.loss.pal.static_threshold = get<double>(doc, "static_threshold");
  cfg.videos_per_bag = get<Index>(doc, "b");
  cfg.length = get<Index>(doc, "L");
  cfg.epochs = get<Index>(doc, "epochs");
  cfg.seed = get<std::uint64_t>(doc, "seed");
  cfg.eval_every = get<Index>(doc, "eval_every");
  cfg.adam.learning_rate = get<double>(doc, "lr");
  cfg.adam.weight_decay = get<double>(doc, "weight_decay");
  cfg.hidden = get<std::vector<Index>>(doc, "hidden");
  cfg.smoother.enabled = get<bool>(doc, "smoother");
  cfg.smoother.window = get<Index>(doc, "smoother_window");
  cfg.eval.far_threshold = get<double>(doc, "far_threshold");
  require(cfg.loss.mpl.set_size >= 0, "set_size must be nonnegative");
  return cfg;
}

json read_config_file(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed config: " + e.what());
  }
  require(doc.is_object(), path.string() + ": config must be a flat JSON object");
  const auto base = path.parent_path();
  for (const char* key : kPathKeys) {
    if (!doc.contains(key) || !doc[key].is_string()) continue;
    const std::filesystem::path p = doc[key].get<std::string>();
    if (!p.empty() && p.is_relative()) doc[key] = (base / p).lexically_normal().generic_string();
  }
  return doc;
}

json merge_config(const json& base, const json& overrides) {
  json out = base;
  for (const auto& [key, value] : overrides.items()) {
    require(base.contains(key), "unknown config key '" + key + "'");
    require(!value.is_object(), "config key '" + key + "' must not be nested");
    out[key] = value;
  }
  return out;
}

TrainConfig resolve_config(const std::filesystem::path& config_file, const json& flag_overrides) {
  json doc = default_config_json();
  bool seeded = flag_overrides.contains("seed");
  if (!config_file.empty()) {
    const json file = read_config_file(config_file);
    seeded = seeded || file.contains("seed");
    doc = merge_config(doc, file);
  }
  if (!seeded) {
    if (const char* env = std::getenv("LAP_SEED"); env && *env) {
      try {
        doc["seed"] = std::stoull(env);
      } catch (const std::exception&) {
        throw Error(std::string("LAP_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  doc = merge_config(doc, flag_overrides);
  return config_from_json(doc);
}

std::string synthetic_config_json(std::uint64_t seed) {
  json doc = {{"train_manifest", "train_manifest.json"},
              {"test_manifest", "test_manifest.json"},
              {"ground_truth", "ground_truth.json"},
              {"prompt_texts", "prompts.txt"},
              {"prompt_embeddings", "prompts.lapf"},
              {"fusion", "concat"},
              {"b", 8},
              {"L", 32},
              {"epochs", 50},
              {"seed", seed}};
  return doc.dump(2) + "\n";
}

}  // namespace lap
