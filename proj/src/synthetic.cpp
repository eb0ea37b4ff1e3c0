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

#include "lap/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"
#include "lap/config.hpp"

namespace lap {
namespace {

// Values are rounded through float32 so the in-memory dataset equals what
// the feature files hold.
Matrix<double> as_stored(const Matrix<double>& m) { return m.cast<float>().cast<double>(); }

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Matrix<double> gaussian(Index rows, Index cols, double scale = 1.0) {
    Matrix<double> m(rows, cols);
    // Row-major fill order so generation does not depend on Eigen's storage.
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) m(r, c) = scale * normal_(rng_);
    return m;
  }

  Index uniform_int(Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng_);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::string video_name(const char* split, const char* kind, Index i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s_%s_%03ld", split, kind, static_cast<long>(i));
  return buf;
}

std::string class_name(Index prompt) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "event_%02ld", static_cast<long>(prompt));
  return buf;
}

}  // namespace

void SyntheticSpec::validate() const {
  require(n_abnormal >= 1, "synthetic: n_abnormal must be >= 1");
  require(n_normal >= 1, "synthetic: n_normal must be >= 1");
  require(n_test_abnormal >= 1, "synthetic: n_test_abnormal must be >= 1");
  require(n_test_normal >= 1, "synthetic: n_test_normal must be >= 1");
  require(visual_dim >= 8, "synthetic: d_v must be >= 8");
  require(semantic_dim >= 8, "synthetic: d_t must be >= 8");
  require(prompts >= 2, "synthetic: need at least 2 prompts");
  require(prompts <= static_cast<Index>(default_prompt_texts().size()),
          "synthetic: at most " + std::to_string(default_prompt_texts().size()) + " prompts");
  require(sigma >= 0 && caption_spread >= 0 && visual_noise >= 0 && visual_shift >= 0 &&
              scene_shift >= 0,
          "synthetic: noise and shift parameters must be nonnegative");
  require(min_snippets >= 1 && max_snippets >= min_snippets,
          "synthetic: need 1 <= min_snippets <= max_snippets");
  require(anomaly_fraction > 0 && anomaly_fraction < 1,
          "synthetic: anomaly_fraction must lie in (0, 1)");
  require(frames_per_snippet >= 1, "synthetic: frames_per_snippet must be positive");
}

SyntheticDataset gen_synthetic(std::uint64_t seed, const SyntheticSpec& spec) {
  spec.validate();
  Sampler sampler(seed);
  SyntheticDataset data;

  const Matrix<double> prompts = as_stored(sampler.gaussian(spec.prompts, spec.semantic_dim));
  const RowVector<double> caption_centre = sampler.gaussian(1, spec.semantic_dim);
  const RowVector<double> visual_centre = sampler.gaussian(1, spec.visual_dim);
  Matrix<double> offsets = sampler.gaussian(spec.prompts, spec.visual_dim);
  offsets.rowwise().normalize();
  offsets *= spec.visual_shift;
  RowVector<double> scene = sampler.gaussian(1, spec.visual_dim);
  scene *= spec.scene_shift / scene.norm();

  std::vector<std::string> texts(default_prompt_texts().begin(),
                                 default_prompt_texts().begin() + spec.prompts);
  data.dictionary = embed_dictionary(std::move(texts), prompts);

  auto make_video = [&](const std::string& id, bool abnormal) {
    VideoFeatures v;
    v.video_id = id;
    v.label = abnormal ? 1 : 0;
    v.frames_per_snippet = spec.frames_per_snippet;
    const Index raw = sampler.uniform_int(spec.min_snippets, spec.max_snippets);
    v.frame_count = raw * spec.frames_per_snippet - sampler.uniform_int(0, spec.frames_per_snippet - 1);
    v.frame_count = std::max(v.frame_count, raw);

    Matrix<double> visual = sampler.gaussian(raw, spec.visual_dim, spec.visual_noise);
    visual.rowwise() += visual_centre;
    Matrix<double> semantic = sampler.gaussian(raw, spec.semantic_dim, spec.caption_spread);
    semantic.rowwise() += caption_centre;

    if (abnormal) {
      const Index prompt = sampler.uniform_int(0, spec.prompts - 1);
      const Index width = std::clamp<Index>(
          static_cast<Index>(std::lround(spec.anomaly_fraction * static_cast<double>(raw))), 1, raw);
      const Index begin = sampler.uniform_int(0, raw - width);
      semantic.middleRows(begin, width) = sampler.gaussian(width, spec.semantic_dim, spec.sigma);
      semantic.middleRows(begin, width).rowwise() += prompts.row(prompt);
      visual.middleRows(begin, width).rowwise() += offsets.row(prompt);
      visual.rowwise() += scene;
      v.class_name = class_name(prompt);
      data.planted_prompt[id] = prompt;
      data.planted_window[id] = {begin, begin + width};
      data.truth.intervals[id] = {{begin * spec.frames_per_snippet,
                                   std::min(v.frame_count, (begin + width) * spec.frames_per_snippet)}};
    }
    v.visual = as_stored(visual);
    v.semantic = as_stored(semantic);
    v.validate();
    return v;
  };

  for (Index i = 0; i < spec.n_abnormal; ++i) data.train.push_back(make_video(video_name("train", "abn", i), true));
  for (Index i = 0; i < spec.n_normal; ++i) data.train.push_back(make_video(video_name("train", "nrm", i), false));
  for (Index i = 0; i < spec.n_test_abnormal; ++i) data.test.push_back(make_video(video_name("test", "abn", i), true));
  for (Index i = 0; i < spec.n_test_normal; ++i) data.test.push_back(make_video(video_name("test", "nrm", i), false));
  return data;
}

std::string spec_to_json(const SyntheticSpec& spec, std::uint64_t seed) {
  nlohmann::json doc = {{"seed", seed},
                        {"n_abnormal", spec.n_abnormal},
                        {"n_normal", spec.n_normal},
                        {"n_test_abnormal", spec.n_test_abnormal},
                        {"n_test_normal", spec.n_test_normal},
                        {"d_v", spec.visual_dim},
                        {"d_t", spec.semantic_dim},
                        {"prompts", spec.prompts},
                        {"sigma", spec.sigma},
                        {"caption_spread", spec.caption_spread},
                        {"visual_noise", spec.visual_noise},
                        {"visual_shift", spec.visual_shift},
                        {"scene_shift", spec.scene_shift},
                        {"min_snippets", spec.min_snippets},
                        {"max_snippets", spec.max_snippets},
                        {"anomaly_fraction", spec.anomaly_fraction},
                        {"frames_per_snippet", spec.frames_per_snippet}};
  return doc.dump(2) + "\n";
}

void write_synthetic(const SyntheticDataset& data, const SyntheticSpec& spec, std::uint64_t seed,
                     const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  auto write_split = [&](const std::vector<VideoFeatures>& videos, const std::string& split) {
    DatasetManifest manifest;
    manifest.split = split;
    for (const auto& v : videos) {
      ManifestEntry e;
      e.video_id = v.video_id;
      e.label = v.label;
      e.class_name = v.class_name;
      e.visual_path = dir / "features" / (v.video_id + "_visual.lapf");
      e.semantic_path = dir / "features" / (v.video_id + "_semantic.lapf");
      e.frame_count = v.frame_count;
      write_feature_file(e.visual_path, v.visual);
      write_feature_file(e.semantic_path, v.semantic);
      manifest.entries.push_back(std::move(e));
    }
    atomic_write(dir / (split + "_manifest.json"), manifest_to_json(manifest, dir));
  };
  fs::create_directories(dir / "features");
  write_split(data.train, "train");
  write_split(data.test, "test");
  atomic_write(dir / "ground_truth.json", ground_truth_to_json(data.truth));

  std::string texts;
  for (const auto& t : data.dictionary.texts) texts += t + "\n";
  atomic_write(dir / "prompts.txt", texts);
  write_feature_file(dir / "prompts.lapf", data.dictionary.embeddings);
  atomic_write(dir / "synthetic_spec.json", spec_to_json(spec, seed));
  atomic_write(dir / "config.json", synthetic_config_json(seed));
}

}  // namespace lap
