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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lap/core.hpp"
#include "lap/feature_file.hpp"

namespace lap {

inline constexpr Index kFramesPerSnippet = 16;

struct VideoFeatures {
  std::string video_id;
  int label = 0;  // 0 normal, 1 abnormal
  std::string class_name;
  Matrix<double> visual;    // snippets x d_v
  Matrix<double> semantic;  // snippets x d_t
  Index frame_count = 0;
  Index frames_per_snippet = kFramesPerSnippet;

  Index snippets() const { return visual.rows(); }

  // Throws lap::Error naming the video if any invariant is broken.
  void validate() const;
};

struct ManifestEntry {
  std::string video_id;
  int label = 0;
  std::string class_name;
  std::filesystem::path visual_path;    // resolved against the manifest directory
  std::filesystem::path semantic_path;
  Index frame_count = 0;
  FeatureHeader visual_header;
  FeatureHeader semantic_header;
};

struct DatasetManifest {
  std::string split;
  std::vector<ManifestEntry> entries;
  Index visual_dim = 0;
  Index semantic_dim = 0;

  std::size_t count_label(int label) const;
};

// Parses the JSON manifest and validates every referenced feature file header.
DatasetManifest load_manifest(const std::filesystem::path& path, std::string split = {});

// Paths are written relative to the manifest's directory when possible.
std::string manifest_to_json(const DatasetManifest& manifest,
                             const std::filesystem::path& manifest_dir);

VideoFeatures load_video(const ManifestEntry& entry);

// Contiguous-partition mean pooling to exactly `length` rows. Partition i
// covers raw rows [floor(i*raw/length), floor((i+1)*raw/length)); when the
// video is shorter than `length`, row i copies raw row floor(i*raw/length).
VideoFeatures resample_to_length(const VideoFeatures& video, Index length);

// Pooling/replication weights used by resample_to_length: output = W * raw.
Matrix<double> resample_weights(Index raw_rows, Index length);

// One training batch: b abnormal videos followed by b normal videos, each
// contributing exactly `length` consecutive rows.
struct FeatureBag {
  Matrix<double> visual;    // 2bL x d_v
  Matrix<double> semantic;  // 2bL x d_t
  Vector<double> video_labels;  // 2b, first half 1, second half 0
  Index videos_per_bag = 0;     // b
  Index length = 0;             // L

  Index half_rows() const { return videos_per_bag * length; }  // N
  auto abnormal_visual() const { return visual.topRows(half_rows()); }
  auto normal_visual() const { return visual.bottomRows(half_rows()); }
  auto abnormal_semantic() const { return semantic.topRows(half_rows()); }
  auto normal_semantic() const { return semantic.bottomRows(half_rows()); }
};

FeatureBag make_bag(std::span<const VideoFeatures> abnormal,
                    std::span<const VideoFeatures> normal, Index length);

struct BagSlice {
  Matrix<double> visual;
  Matrix<double> semantic;
};

// Inverse of make_bag's layout: one slice per video, abnormal first.
std::vector<BagSlice> split_bag(const FeatureBag& bag);

// Per-video anomalous frame intervals [begin, end). Videos absent from the
// map have no anomalous frames.
struct FrameGroundTruth {
  std::map<std::string, std::vector<std::pair<Index, Index>>> intervals;

  Eigen::VectorXi frame_labels(const std::string& video_id, Index frame_count) const;
};

FrameGroundTruth load_ground_truth(const std::filesystem::path& path);
std::string ground_truth_to_json(const FrameGroundTruth& truth);

}  // namespace lap
