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

#include "lap/commands.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lap/config.hpp"

namespace lap {
namespace {

namespace fs = std::filesystem;

std::string csv_quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

std::string csv_metric(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::vector<VideoFeatures> load_videos(const DatasetManifest& manifest) {
  std::vector<VideoFeatures> videos;
  videos.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) videos.push_back(load_video(e));
  return videos;
}

void write_training_artifacts(const TrainConfig& cfg, const TrainResult& result) {
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  atomic_write(dir / "effective_config.json", config_to_json(cfg).dump(2) + "\n");
  atomic_write(dir / "train_log.csv", log_to_csv(result.log));
  save_checkpoint(dir / "final.lapc", result.final_params, result.meta);
  save_checkpoint(dir / "best.lapc", result.best_params, result.meta);

  nlohmann::json summary = {{"epochs", cfg.epochs},
                            {"steps", result.log.empty() ? 0 : result.log.back().step},
                            {"best_epoch", result.best_epoch}};
  if (result.best_report) summary["best"] = nlohmann::json::parse(report_to_json(*result.best_report));
  if (!result.log.empty() && result.log.back().report) {
    summary["final"] = nlohmann::json::parse(report_to_json(*result.log.back().report));
  }
  atomic_write(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace

void cmd_gen_synth(const GenSynthOptions& options, std::ostream& out) {
  options.spec.validate();
  require(!options.out_dir.empty(), "gen-synth: --out-dir is required");
  const SyntheticDataset data = gen_synthetic(options.seed, options.spec);
  write_synthetic(data, options.spec, options.seed, options.out_dir);
  out << "wrote " << data.train.size() << " training and " << data.test.size()
      << " test videos to " << options.out_dir.string() << "\n";
}

TrainData load_train_data(const TrainConfig& cfg) {
  require(!cfg.train_manifest.empty(), "train_manifest is required");
  require(!cfg.prompt_texts.empty() && !cfg.prompt_embeddings.empty(),
          "prompt_texts and prompt_embeddings are required");
  TrainData data;
  const DatasetManifest train_manifest = load_manifest(cfg.train_manifest, "train");
  data.train = load_videos(train_manifest);
  if (!cfg.test_manifest.empty()) {
    require(!cfg.ground_truth.empty(), "ground_truth is required when test_manifest is set");
    const DatasetManifest test_manifest = load_manifest(cfg.test_manifest, "test");
    require(test_manifest.visual_dim == train_manifest.visual_dim &&
                test_manifest.semantic_dim == train_manifest.semantic_dim,
            "test features (d_v=" + std::to_string(test_manifest.visual_dim) + ", d_t=" +
                std::to_string(test_manifest.semantic_dim) + ") differ from training features (d_v=" +
                std::to_string(train_manifest.visual_dim) + ", d_t=" +
                std::to_string(train_manifest.semantic_dim) + ")");
    data.test = load_videos(test_manifest);
    data.truth = load_ground_truth(cfg.ground_truth);
  }
  data.dictionary = load_dictionary(cfg.prompt_texts, cfg.prompt_embeddings);
  return data;
}

TrainResult cmd_train(const TrainConfig& cfg, std::ostream& out) {
  require(!cfg.out_dir.empty(), "train: out_dir is required");
  const TrainData data = load_train_data(cfg);
  validate(cfg, data);
  TrainResult result = train(data, cfg, [&](const LogRow& row) {
    out << "epoch " << row.epoch << " l_lap=" << row.l_lap;
    if (row.report) out << " auc_all=" << fmt(row.report->auc_all);
    out << "\n";
  });
  write_training_artifacts(cfg, result);

  out << "done: epochs=" << cfg.epochs << " best_epoch=" << result.best_epoch;
  if (!result.log.empty() && result.log.back().report) {
    const auto& r = *result.log.back().report;
    out << " final auc_all=" << fmt(r.auc_all) << " auc_abn=" << fmt(r.auc_abn)
        << " ap=" << fmt(r.ap) << " far_all=" << fmt(r.far_all) << " far_abn=" << fmt(r.far_abn);
  }
  out << "\n";
  return result;
}

EvalReport cmd_eval(const EvalCommandOptions& options, std::ostream& out) {
  require(!options.checkpoint.empty(), "eval: --checkpoint is required");
  require(!options.manifest.empty(), "eval: --manifest is required");
  require(!options.ground_truth.empty(), "eval: --ground-truth is required");
  const Checkpoint checkpoint = load_checkpoint(options.checkpoint);
  const DatasetManifest manifest = load_manifest(options.manifest, "test");
  const FrameGroundTruth truth = load_ground_truth(options.ground_truth);
  const Evaluation result = evaluate(checkpoint, manifest, truth, options.eval);

  const std::string json = report_to_json(result.report);
  if (!options.report.empty()) atomic_write(options.report, json);
  if (!options.per_frame_csv.empty()) atomic_write(options.per_frame_csv, frames_to_csv(result.frames));
  out << json;
  return result.report;
}

std::vector<AblationRow> cmd_ablate(const TrainConfig& cfg, std::ostream& out) {
  require(!cfg.out_dir.empty(), "ablate: out_dir is required");
  const TrainData data = load_train_data(cfg);
  require(!data.test.empty(), "ablate: a test split is required");

  struct Variant {
    const char* name;
    bool fs, mpl, pal;
  };
  const Variant variants[] = {{"baseline", false, false, false},
                              {"fs", true, false, false},
                              {"fs_mpl", true, true, false},
                              {"fs_mpl_pal", true, true, true}};
  std::vector<TrainConfig> configs;
  for (const auto& v : variants) {
    TrainConfig c = cfg;
    c.visual_only = !v.fs;
    c.loss.weights.beta = v.mpl ? cfg.loss.weights.beta : 0.0;
    c.loss.weights.gamma = v.pal ? cfg.loss.weights.gamma : 0.0;
    c.out_dir = cfg.out_dir / v.name;
    validate(c, data);
    configs.push_back(std::move(c));
  }

  std::vector<AblationRow> rows;
  std::ostringstream csv;
  csv << "row,baseline,fs,mpl,pal,auc_all,auc_abn,ap,far_all,far_abn\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const Variant& v = variants[i];
    out << "ablation row " << v.name << "\n";
    const TrainResult result = train(data, configs[i]);
    write_training_artifacts(configs[i], result);
    AblationRow row{v.name, v.fs, v.mpl, v.pal, *result.log.back().report};
    csv << row.name << ",1," << v.fs << ',' << v.mpl << ',' << v.pal << ','
        << csv_metric(row.report.auc_all) << ',' << csv_metric(row.report.auc_abn) << ','
        << csv_metric(row.report.ap) << ',' << csv_metric(row.report.far_all) << ','
        << csv_metric(row.report.far_abn) << '\n';
    out << "  auc_all=" << fmt(row.report.auc_all) << " auc_abn=" << fmt(row.report.auc_abn)
        << " ap=" << fmt(row.report.ap) << "\n";
    rows.push_back(std::move(row));
  }
  atomic_write(cfg.out_dir / "ablation.csv", csv.str());
  atomic_write(cfg.out_dir / "effective_config.json", config_to_json(cfg).dump(2) + "\n");
  return rows;
}

std::vector<PromptCount> cmd_inspect_prompts(const InspectOptions& options, std::ostream& out) {
  require(!options.out_dir.empty(), "inspect-prompts: --out-dir is required");
  require(options.length >= 1, "inspect-prompts: L must be positive");
  const DatasetManifest manifest = load_manifest(options.manifest);
  const PromptDictionary dict = load_dictionary(options.prompt_texts, options.prompt_embeddings);
  require(dict.dim() == manifest.semantic_dim,
          "prompt embeddings have d_t=" + std::to_string(dict.dim()) +
              " but semantic features have d_t=" + std::to_string(manifest.semantic_dim));

  std::vector<std::pair<VideoFeatures, AnomalyEvidence>> per_video;
  Index abnormal_rows = 0;
  for (const auto& entry : manifest.entries) {
    VideoFeatures video = resample_to_length(load_video(entry), options.length);
    AnomalyEvidence evidence = compute_evidence(video.semantic, dict);
    if (video.label == 1) abnormal_rows += video.snippets();
    per_video.emplace_back(std::move(video), std::move(evidence));
  }

  IndexVector abnormal_best(abnormal_rows);
  Index at = 0;
  std::ostringstream videos_csv;
  videos_csv << "video_id,label,class_name,modal_prompt,modal_count\n";
  for (const auto& [video, evidence] : per_video) {
    std::ostringstream psi_csv;
    psi_csv << "snippet";
    for (Index j = 0; j < dict.size(); ++j) psi_csv << ",p" << j;
    psi_csv << '\n';
    char buf[40];
    for (Index i = 0; i < evidence.psi.rows(); ++i) {
      psi_csv << i;
      for (Index j = 0; j < evidence.psi.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.9g", evidence.psi(i, j));
        psi_csv << ',' << buf;
      }
      psi_csv << '\n';
    }
    atomic_write(options.out_dir / "psi" / (video.video_id + ".csv"), psi_csv.str());

    const auto hist = prompt_distribution(evidence.best_prompt, dict);
    videos_csv << video.video_id << ',' << video.label << ',' << csv_quote(video.class_name) << ','
               << hist.front().prompt << ',' << hist.front().count << '\n';
    if (video.label == 1) {
      abnormal_best.segment(at, evidence.best_prompt.size()) = evidence.best_prompt;
      at += evidence.best_prompt.size();
    }
  }
  atomic_write(options.out_dir / "videos.csv", videos_csv.str());

  const auto hist = prompt_distribution(abnormal_best, dict);
  std::ostringstream hist_csv;
  hist_csv << "prompt,text,count\n";
  for (const auto& h : hist) hist_csv << h.prompt << ',' << csv_quote(h.text) << ',' << h.count << '\n';
  atomic_write(options.out_dir / "histogram.csv", hist_csv.str());
  out << "wrote psi for " << per_video.size() << " videos; " << abnormal_rows
      << " abnormal snippets matched to " << hist.size() << " prompts\n";
  return hist;
}

}  // namespace lap
