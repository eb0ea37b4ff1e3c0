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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lap/checkpoint.hpp"
#include "lap/features.hpp"

namespace lap {

struct EvalOptions {
  double far_threshold = 0.5;
};

// Metrics that are undefined for the data (e.g. AUC_abn without any
// abnormal video) are left empty and serialized as null.
struct EvalReport {
  std::optional<double> auc_all, auc_abn, ap, far_all, far_abn;
  std::map<std::string, std::optional<double>> class_auc;
  Index videos = 0;
  Index abnormal_videos = 0;
  Index frames = 0;
  Index anomalous_frames = 0;
};

std::string report_to_json(const EvalReport& report);

struct FrameScores {
  std::string video_id;
  int video_label = 0;
  std::string class_name;
  Vector<double> scores;     // one per frame
  Eigen::VectorXi labels;    // one per frame
};

/// Nearest-snippet replication: frame f takes snippet floor(f * L / frame_count).
Vector<double> expand_to_frames(const Vector<double>& snippet_scores, Index frame_count);

/// Inference path: resample, fuse, score, optionally smooth. No prompt
/// dictionary is involved.
Vector<double> predict_snippets(const MlpParams<double>& params, const ModelMeta& meta,
                                const VideoFeatures& video);

std::vector<FrameScores> score_frames(const MlpParams<double>& params, const ModelMeta& meta,
                                      const std::vector<VideoFeatures>& videos,
                                      const FrameGroundTruth& truth);

EvalReport evaluate_frames(const std::vector<FrameScores>& frames, const EvalOptions& options = {});

std::string frames_to_csv(const std::vector<FrameScores>& frames);

// Throws with both dimensions named if the checkpoint cannot consume the data.
void check_compatible(const ModelMeta& meta, Index visual_dim, Index semantic_dim);

struct Evaluation {
  EvalReport report;
  std::vector<FrameScores> frames;
};

Evaluation evaluate(const Checkpoint& checkpoint, const DatasetManifest& manifest,
                    const FrameGroundTruth& truth, const EvalOptions& options = {});

}  // namespace lap
