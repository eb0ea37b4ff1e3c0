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

#include "lap/features.hpp"

#include <set>

#include "json.hpp"

namespace lap {
namespace {

using nlohmann::json;

std::string video_context(const std::string& video_id) { return "video '" + video_id + "'"; }

}  // namespace

void VideoFeatures::validate() const {
  const std::string ctx = video_context(video_id);
  require(label == 0 || label == 1, ctx + ": label must be 0 or 1");
  require(visual.rows() >= 1, ctx + ": no snippets");
  require(visual.rows() == semantic.rows(),
          ctx + ": visual has " + std::to_string(visual.rows()) + " rows but semantic has " +
              std::to_string(semantic.rows()));
  require(visual.allFinite() && semantic.allFinite(), ctx + ": non-finite feature value");
  require(frames_per_snippet >= 1, ctx + ": frames_per_snippet must be positive");
  require(frame_count >= visual.rows(),
          ctx + ": frame_count " + std::to_string(frame_count) + " is smaller than snippet count " +
              std::to_string(visual.rows()));
}

std::size_t DatasetManifest::count_label(int label) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += (e.label == label);
  return n;
}

DatasetManifest load_manifest(const std::filesystem::path& path, std::string split) {
  const std::filesystem::path base = path.parent_path();
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed manifest: " + e.what());
  }
  require(doc.is_array(), path.string() + ": manifest must be a JSON array");
  require(!doc.empty(), path.string() + ": no videos");

  DatasetManifest manifest;
  manifest.split = split.empty() ? path.stem().string() : std::move(split);
  std::set<std::string> seen;
  for (const auto& record : doc) {
    ManifestEntry entry;
    try {
      entry.video_id = record.at("video_id").get<std::string>();
      entry.label = record.at("label").get<int>();
      entry.class_name = record.contains("class_name") && !record["class_name"].is_null()
                             ? record["class_name"].get<std::string>()
                             : std::string{};
      entry.visual_path = record.at("visual_path").get<std::string>();
      entry.semantic_path = record.at("semantic_path").get<std::string>();
      entry.frame_count = record.at("frame_count").get<Index>();
    } catch (const json::exception& e) {
      throw Error(path.string() + ": malformed manifest record: " + e.what());
    }
    const std::string ctx = video_context(entry.video_id);
    require(seen.insert(entry.video_id).second, ctx + ": duplicate video_id");
    require(entry.label == 0 || entry.label == 1, ctx + ": label must be 0 or 1");
    require(entry.frame_count >= 1, ctx + ": frame_count must be positive");
    if (entry.visual_path.is_relative()) entry.visual_path = base / entry.visual_path;
    if (entry.semantic_path.is_relative()) entry.semantic_path = base / entry.semantic_path;

    try {
      entry.visual_header = read_feature_header(entry.visual_path);
      entry.semantic_header = read_feature_header(entry.semantic_path);
    } catch (const Error& e) {
      throw Error(ctx + ": " + e.what());
    }
    require(entry.visual_header.rows == entry.semantic_header.rows,
            ctx + ": visual has " + std::to_string(entry.visual_header.rows) +
                " snippets but semantic has " + std::to_string(entry.semantic_header.rows));
    require(entry.frame_count >= entry.visual_header.rows,
            ctx + ": frame_count smaller than snippet count");

    if (manifest.entries.empty()) {
      manifest.visual_dim = entry.visual_header.cols;
      manifest.semantic_dim = entry.semantic_header.cols;
    }
    require(entry.visual_header.cols == manifest.visual_dim,
            ctx + ": dimension mismatch, visual d_v=" + std::to_string(entry.visual_header.cols) +
                " but earlier videos have " + std::to_string(manifest.visual_dim));
    require(entry.semantic_header.cols == manifest.semantic_dim,
            ctx + ": dimension mismatch, semantic d_t=" +
                std::to_string(entry.semantic_header.cols) + " but earlier videos have " +
                std::to_string(manifest.semantic_dim));
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

std::string manifest_to_json(const DatasetManifest& manifest,
                             const std::filesystem::path& manifest_dir) {
  auto rel = [&](const std::filesystem::path& p) {
    return manifest_dir.empty() ? p.generic_string()
                                : p.lexically_relative(manifest_dir).generic_string();
  };
  json doc = json::array();
  for (const auto& e : manifest.entries) {
    doc.push_back({{"video_id", e.video_id},
                   {"label", e.label},
                   {"class_name", e.class_name},
                   {"visual_path", rel(e.visual_path)},
                   {"semantic_path", rel(e.semantic_path)},
                   {"frame_count", e.frame_count}});
  }
  return doc.dump(2) + "\n";
}

VideoFeatures load_video(const ManifestEntry& entry) {
  VideoFeatures video;
  video.video_id = entry.video_id;
  video.label = entry.label;
  video.class_name = entry.class_name;
  video.frame_count = entry.frame_count;
  try {
    video.visual = read_feature_file(entry.visual_path);
    video.semantic = read_feature_file(entry.semantic_path);
  } catch (const Error& e) {
    throw Error(video_context(entry.video_id) + ": " + e.what());
  }
  video.validate();
  return video;
}

Matrix<double> resample_weights(Index raw_rows, Index length) {
  require(length >= 1, "resample length must be positive");
  require(raw_rows >= 1, "cannot resample a video with no snippets");
  Matrix<double> weights = Matrix<double>::Zero(length, raw_rows);
  for (Index i = 0; i < length; ++i) {
    const Index begin = i * raw_rows / length;
    if (raw_rows < length) {
      weights(i, begin) = 1.0;
      continue;
    }
    const Index end = (i + 1) * raw_rows / length;
    const double w = 1.0 / static_cast<double>(end - begin);
    for (Index r = begin; r < end; ++r) weights(i, r) = w;
  }
  return weights;
}

VideoFeatures resample_to_length(const VideoFeatures& video, Index length) {
  require(length >= 1, "resample length must be positive");
  require(video.snippets() >= 1, video_context(video.video_id) + ": no snippets to resample");
  VideoFeatures out = video;
  if (video.snippets() == length) return out;
  const Matrix<double> weights = resample_weights(video.snippets(), length);
  out.visual = weights * video.visual;
  out.semantic = weights * video.semantic;
  return out;
}

FeatureBag make_bag(std::span<const VideoFeatures> abnormal, std::span<const VideoFeatures> normal,
                    Index length) {
  require(!abnormal.empty(), "bag needs at least one video per half");
  require(abnormal.size() == normal.size(),
          "unequal bag halves: " + std::to_string(abnormal.size()) + " abnormal vs " +
              std::to_string(normal.size()) + " normal");
  const Index b = static_cast<Index>(abnormal.size());
  const Index d_v = abnormal.front().visual.cols();
  const Index d_t = abnormal.front().semantic.cols();

  FeatureBag bag;
  bag.videos_per_bag = b;
  bag.length = length;
  bag.visual.resize(2 * b * length, d_v);
  bag.semantic.resize(2 * b * length, d_t);
  bag.video_labels.resize(2 * b);

  auto place = [&](const VideoFeatures& v, Index slot, int expected_label) {
    const std::string ctx = video_context(v.video_id);
    require(v.label == expected_label,
            ctx + (expected_label ? ": normal video in abnormal half" : ": abnormal video in normal half"));
    require(v.snippets() == length, ctx + ": has " + std::to_string(v.snippets()) +
                                        " snippets, expected " + std::to_string(length));
    require(v.visual.cols() == d_v, ctx + ": inconsistent d_v " + std::to_string(v.visual.cols()) +
                                        " vs " + std::to_string(d_v));
    require(v.semantic.cols() == d_t, ctx + ": inconsistent d_t " +
                                          std::to_string(v.semantic.cols()) + " vs " +
                                          std::to_string(d_t));
    bag.visual.middleRows(slot * length, length) = v.visual;
    bag.semantic.middleRows(slot * length, length) = v.semantic;
    bag.video_labels(slot) = expected_label;
  };
  for (Index j = 0; j < b; ++j) place(abnormal[j], j, 1);
  for (Index j = 0; j < b; ++j) place(normal[j], b + j, 0);
  return bag;
}

std::vector<BagSlice> split_bag(const FeatureBag& bag) {
  std::vector<BagSlice> slices;
  const Index videos = 2 * bag.videos_per_bag;
  slices.reserve(videos);
  for (Index j = 0; j < videos; ++j) {
    slices.push_back({bag.visual.middleRows(j * bag.length, bag.length),
                      bag.semantic.middleRows(j * bag.length, bag.length)});
  }
  return slices;
}

Eigen::VectorXi FrameGroundTruth::frame_labels(const std::string& video_id,
                                               Index frame_count) const {
  Eigen::VectorXi labels = Eigen::VectorXi::Zero(frame_count);
  const auto it = intervals.find(video_id);
  if (it == intervals.end()) return labels;
  for (const auto& [begin, end] : it->second) {
    const Index lo = std::clamp<Index>(begin, 0, frame_count);
    const Index hi = std::clamp<Index>(end, 0, frame_count);
    if (hi > lo) labels.segment(lo, hi - lo).setOnes();
  }
  return labels;
}

FrameGroundTruth load_ground_truth(const std::filesystem::path& path) {
  FrameGroundTruth truth;
  try {
    const json doc = json::parse(read_file(path));
    require(doc.is_object(), path.string() + ": ground truth must be a JSON object");
    for (const auto& [video_id, spans] : doc.items()) {
      auto& list = truth.intervals[video_id];
      for (const auto& span : spans) {
        const Index begin = span.at(0).get<Index>();
        const Index end = span.at(1).get<Index>();
        require(begin >= 0 && end >= begin,
                path.string() + ": bad interval for video '" + video_id + "'");
        list.emplace_back(begin, end);
      }
    }
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed ground truth: " + e.what());
  }
  return truth;
}

std::string ground_truth_to_json(const FrameGroundTruth& truth) {
  json doc = json::object();
  for (const auto& [video_id, spans] : truth.intervals) {
    json list = json::array();
    for (const auto& [begin, end] : spans) list.push_back({begin, end});
    doc[video_id] = list;
  }
  return doc.dump(2) + "\n";
}

}  // namespace lap
