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

#include "lap/evaluate.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lap/metrics.hpp"

namespace lap {
namespace {

template <typename Fn>
std::optional<double> try_metric(Fn&& fn) {
  try {
    return fn();
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct Pooled {
  Vector<double> scores;
  Eigen::VectorXi labels;
};

template <typename Keep>
Pooled pool(const std::vector<FrameScores>& frames, Keep&& keep) {
  Index total = 0;
  for (const auto& f : frames) {
    if (keep(f)) total += f.scores.size();
  }
  Pooled out{Vector<double>(total), Eigen::VectorXi(total)};
  Index at = 0;
  for (const auto& f : frames) {
    if (!keep(f)) continue;
    out.scores.segment(at, f.scores.size()) = f.scores;
    out.labels.segment(at, f.labels.size()) = f.labels;
    at += f.scores.size();
  }
  return out;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [name, auc] : report.class_auc) classes[name] = optional_json(auc);
  nlohmann::json doc = {{"auc_all", optional_json(report.auc_all)},
                        {"auc_abn", optional_json(report.auc_abn)},
                        {"ap", optional_json(report.ap)},
                        {"far_all", optional_json(report.far_all)},
                        {"far_abn", optional_json(report.far_abn)},
                        {"class_auc", classes},
                        {"videos", report.videos},
                        {"abnormal_videos", report.abnormal_videos},
                        {"frames", report.frames},
                        {"anomalous_frames", report.anomalous_frames}};
  return doc.dump(2) + "\n";
}

Vector<double> expand_to_frames(const Vector<double>& snippet_scores, Index frame_count) {
  require(snippet_scores.size() >= 1, "expand_to_frames: no snippet scores");
  require(frame_count >= 1, "expand_to_frames: frame_count must be positive");
  const Index snippets = snippet_scores.size();
  Vector<double> frames(frame_count);
  for (Index f = 0; f < frame_count; ++f) frames(f) = snippet_scores(f * snippets / frame_count);
  return frames;
}

void check_compatible(const ModelMeta& meta, Index visual_dim, Index semantic_dim) {
  FusionConfig data = meta.fusion;
  data.visual_dim = visual_dim;
  data.semantic_dim = semantic_dim;
  const bool add_ok = data.mode != FusionMode::kAdd || visual_dim == semantic_dim;
  if (add_ok && visual_dim == meta.fusion.visual_dim && semantic_dim == meta.fusion.semantic_dim) {
    return;
  }
  throw Error("checkpoint expects d_f=" + std::to_string(meta.fusion.fused_dim()) +
              " (d_v=" + std::to_string(meta.fusion.visual_dim) + ", d_t=" +
              std::to_string(meta.fusion.semantic_dim) + ") but data has d_f=" +
              std::to_string(add_ok ? data.fused_dim() : visual_dim) + " (d_v=" +
              std::to_string(visual_dim) + ", d_t=" + std::to_string(semantic_dim) + ")");
}

Vector<double> predict_snippets(const MlpParams<double>& params, const ModelMeta& meta,
                                const VideoFeatures& video) {
  check_compatible(meta, video.visual.cols(), video.semantic.cols());
  const VideoFeatures resampled = resample_to_length(video, meta.length);
  Matrix<double> fused;
  if (meta.visual_only) {
    fused = fuse(resampled.visual, Matrix<double>::Zero(meta.length, resampled.semantic.cols()),
                 meta.fusion);
  } else {
    fused = fuse(resampled.visual, resampled.semantic, meta.fusion);
  }
  return smooth_scores(forward(fused, params), meta.smoother);
}

std::vector<FrameScores> score_frames(const MlpParams<double>& params, const ModelMeta& meta,
                                      const std::vector<VideoFeatures>& videos,
                                      const FrameGroundTruth& truth) {
  std::vector<FrameScores> out;
  out.reserve(videos.size());
  for (const auto& video : videos) {
    FrameScores f;
    f.video_id = video.video_id;
    f.video_label = video.label;
    f.class_name = video.class_name;
    f.scores = expand_to_frames(predict_snippets(params, meta, video), video.frame_count);
    f.labels = truth.frame_labels(video.video_id, video.frame_count);
    require(video.label == 1 || f.labels.sum() == 0,
            "video '" + video.video_id + "': normal video has anomalous ground-truth frames");
    out.push_back(std::move(f));
  }
  return out;
}

EvalReport evaluate_frames(const std::vector<FrameScores>& frames, const EvalOptions& options) {
  require(!frames.empty(), "evaluate: no test videos");
  EvalReport report;
  report.videos = static_cast<Index>(frames.size());
  for (const auto& f : frames) {
    require(f.scores.size() == f.labels.size(),
            "evaluate: score/label length mismatch for video '" + f.video_id + "'");
    report.abnormal_videos += f.video_label;
    report.frames += f.scores.size();
    report.anomalous_frames += f.labels.sum();
  }

  const Pooled all = pool(frames, [](const FrameScores&) { return true; });
  const Pooled abnormal = pool(frames, [](const FrameScores& f) { return f.video_label == 1; });
  report.auc_all = try_metric([&] { return roc_auc(all.scores, all.labels); });
  report.ap = try_metric([&] { return average_precision(all.scores, all.labels); });
  report.far_all = try_metric(
      [&] { return false_alarm_rate(all.scores, all.labels, options.far_threshold); });
  report.auc_abn = try_metric([&] { return roc_auc(abnormal.scores, abnormal.labels); });
  report.far_abn = try_metric(
      [&] { return false_alarm_rate(abnormal.scores, abnormal.labels, options.far_threshold); });

  std::set<std::string> classes;
  for (const auto& f : frames) {
    if (f.video_label == 1 && !f.class_name.empty()) classes.insert(f.class_name);
  }
  for (const auto& name : classes) {
    const Pooled pooled = pool(frames, [&](const FrameScores& f) {
      return f.video_label == 0 || f.class_name == name;
    });
    report.class_auc[name] = try_metric([&] { return roc_auc(pooled.scores, pooled.labels); });
  }
  return report;
}

std::string frames_to_csv(const std::vector<FrameScores>& frames) {
  std::ostringstream out;
  out << "video_id,frame_index,score,label\n";
  char buf[64];
  for (const auto& f : frames) {
    for (Index i = 0; i < f.scores.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", f.scores(i));
      out << f.video_id << ',' << i << ',' << buf << ',' << f.labels(i) << '\n';
    }
  }
  return out.str();
}

Evaluation evaluate(const Checkpoint& checkpoint, const DatasetManifest& manifest,
                    const FrameGroundTruth& truth, const EvalOptions& options) {
  require(!manifest.entries.empty(), "evaluate: test split is empty");
  check_compatible(checkpoint.meta, manifest.visual_dim, manifest.semantic_dim);
  std::vector<VideoFeatures> videos;
  videos.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    videos.push_back(resample_to_length(load_video(entry), checkpoint.meta.length));
  }
  Evaluation result;
  result.frames = score_frames(checkpoint.params, checkpoint.meta, videos, truth);
  result.report = evaluate_frames(result.frames, options);
  return result;
}

}  // namespace lap
