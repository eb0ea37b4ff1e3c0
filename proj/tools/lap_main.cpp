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

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lap/commands.hpp"
#include "lap/config.hpp"

namespace {

using nlohmann::json;

// Registers one flag per run-config key; only flags given on the command
// line end up in the override object.
class ConfigFlags {
 public:
  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "Run config (flat JSON object)");
    path(app, "--train-manifest", "train_manifest");
    path(app, "--test-manifest", "test_manifest");
    path(app, "--ground-truth", "ground_truth");
    path(app, "--prompt-texts", "prompt_texts");
    path(app, "--prompt-embeddings", "prompt_embeddings");
    path(app, "--out-dir", "out_dir");
    typed<std::string>(app, "--fusion", "fusion", "concat | add");
    typed<bool>(app, "--visual-only", "visual_only", "zero the semantic input");
    typed<std::int64_t>(app, "--k", "k", "top-k snippets per video");
    typed<double>(app, "--alpha", "alpha", "triplet margin");
    typed<double>(app, "--beta", "beta", "MPL weight");
    typed<double>(app, "--gamma", "gamma", "PAL weight");
    typed<double>(app, "--tau", "tau", "dynamic threshold std multiplier");
    typed<std::int64_t>(app, "--set-size", "set_size", "MPL selection size (0 = P)");
    typed<std::string>(app, "--threshold-mode", "threshold_mode", "dynamic | static");
    typed<double>(app, "--static-threshold", "static_threshold", "threshold for static mode");
    typed<std::int64_t>(app, "--b", "b", "videos per bag");
    typed<std::int64_t>(app, "--L", "L", "snippets per video");
    typed<std::int64_t>(app, "--epochs", "epochs", "training epochs");
    typed<std::uint64_t>(app, "--seed", "seed", "seed (falls back to LAP_SEED)");
    typed<std::int64_t>(app, "--eval-every", "eval_every", "evaluate every n epochs");
    typed<double>(app, "--lr", "lr", "Adam learning rate");
    typed<double>(app, "--weight-decay", "weight_decay", "L2 weight decay");
    typed<std::vector<std::int64_t>>(app, "--hidden", "hidden", "hidden layer widths, e.g. 512,128");
    typed<bool>(app, "--smoother", "smoother", "enable score smoothing");
    typed<std::int64_t>(app, "--smoother-window", "smoother_window", "odd smoothing window");
    typed<double>(app, "--far-threshold", "far_threshold", "false alarm threshold");
  }

  json overrides() const {
    json out = json::object();
    for (const auto& collect : collectors_) collect(out);
    return out;
  }

  std::string config_file;

 private:
  template <typename T>
  void typed(CLI::App* app, const std::string& flag, const std::string& key,
             const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    if constexpr (std::is_same_v<T, std::vector<std::int64_t>>) opt->delimiter(',');
    collectors_.push_back([opt, value, key](json& out) {
      if (opt->count() > 0) out[key] = *value;
    });
  }

  void path(CLI::App* app, const std::string& flag, const std::string& key) {
    auto value = std::make_shared<std::string>();
    CLI::Option* opt = app->add_option(flag, *value, key);
    collectors_.push_back([opt, value, key](json& out) {
      if (opt->count() > 0) out[key] = std::filesystem::absolute(*value).lexically_normal().string();
    });
  }

  std::vector<std::function<void(json&)>> collectors_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prompt-guided weakly supervised video anomaly detection"};
  app.require_subcommand(1);

  lap::GenSynthOptions synth;
  std::string synth_out;
  auto* gen = app.add_subcommand("gen-synth", "Generate the planted-anomaly synthetic benchmark");
  gen->add_option("--seed", synth.seed, "generator seed");
  gen->add_option("--out-dir", synth_out, "output directory")->required();
  gen->add_option("--n-abnormal", synth.spec.n_abnormal, "training abnormal videos");
  gen->add_option("--n-normal", synth.spec.n_normal, "training normal videos");
  gen->add_option("--n-test-abnormal", synth.spec.n_test_abnormal, "test abnormal videos");
  gen->add_option("--n-test-normal", synth.spec.n_test_normal, "test normal videos");
  gen->add_option("--d-v", synth.spec.visual_dim, "visual feature dimension");
  gen->add_option("--d-t", synth.spec.semantic_dim, "semantic feature dimension");
  gen->add_option("--prompts", synth.spec.prompts, "dictionary size P");
  gen->add_option("--sigma", synth.spec.sigma, "caption noise inside anomaly windows");
  gen->add_option("--caption-spread", synth.spec.caption_spread, "caption noise of normal snippets");
  gen->add_option("--visual-noise", synth.spec.visual_noise, "visual noise");
  gen->add_option("--visual-shift", synth.spec.visual_shift, "class offset norm");
  gen->add_option("--scene-shift", synth.spec.scene_shift, "abnormal-video scene offset norm");
  gen->add_option("--min-snippets", synth.spec.min_snippets, "minimum raw snippets per video");
  gen->add_option("--max-snippets", synth.spec.max_snippets, "maximum raw snippets per video");
  gen->add_option("--anomaly-fraction", synth.spec.anomaly_fraction, "planted window fraction");
  bool synth_seed_given = false;
  gen->callback([&] { synth_seed_given = gen->get_option("--seed")->count() > 0; });

  ConfigFlags train_flags;
  auto* train = app.add_subcommand("train", "Train the score predictor");
  train_flags.attach(train);

  ConfigFlags ablate_flags;
  auto* ablate = app.add_subcommand("ablate", "Run the four-row module ablation");
  ablate_flags.attach(ablate);

  lap::EvalCommandOptions eval_opts;
  std::string ckpt, manifest, truth, report, per_frame;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a test manifest");
  eval->add_option("--checkpoint", ckpt, "checkpoint (.lapc)")->required();
  eval->add_option("--manifest", manifest, "test manifest")->required();
  eval->add_option("--ground-truth", truth, "frame ground truth JSON")->required();
  eval->add_option("--out", report, "write the report JSON here");
  eval->add_option("--per-frame-csv", per_frame, "write per-frame scores here");
  eval->add_option("--far-threshold", eval_opts.eval.far_threshold, "false alarm threshold");

  lap::InspectOptions inspect_opts;
  std::string in_manifest, in_texts, in_emb, in_out;
  auto* inspect = app.add_subcommand("inspect-prompts", "Dump anomaly matrices and prompt histogram");
  inspect->add_option("--manifest", in_manifest, "manifest")->required();
  inspect->add_option("--prompt-texts", in_texts, "prompt sentences, one per line")->required();
  inspect->add_option("--prompt-embeddings", in_emb, "prompt embeddings (.lapf)")->required();
  inspect->add_option("--out-dir", in_out, "output directory")->required();
  inspect->add_option("--L", inspect_opts.length, "snippets per video");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!synth_seed_given) {
        if (const char* env = std::getenv("LAP_SEED"); env && *env) synth.seed = std::stoull(env);
      }
      synth.out_dir = synth_out;
      lap::cmd_gen_synth(synth, std::cout);
    } else if (*train) {
      lap::cmd_train(lap::resolve_config(train_flags.config_file, train_flags.overrides()), std::cout);
    } else if (*ablate) {
      lap::cmd_ablate(lap::resolve_config(ablate_flags.config_file, ablate_flags.overrides()),
                      std::cout);
    } else if (*eval) {
      eval_opts.checkpoint = ckpt;
      eval_opts.manifest = manifest;
      eval_opts.ground_truth = truth;
      eval_opts.report = report;
      eval_opts.per_frame_csv = per_frame;
      lap::cmd_eval(eval_opts, std::cout);
    } else if (*inspect) {
      inspect_opts.manifest = in_manifest;
      inspect_opts.prompt_texts = in_texts;
      inspect_opts.prompt_embeddings = in_emb;
      inspect_opts.out_dir = in_out;
      lap::cmd_inspect_prompts(inspect_opts, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
