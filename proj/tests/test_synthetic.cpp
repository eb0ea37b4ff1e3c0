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

#include <map>
#include <random>

#include "doctest.h"
#include "lap/feature_file.hpp"
#include "lap/synthetic.hpp"
#include "test_util.hpp"

namespace {

using namespace lap;
using lap::testing::scratch_dir;

std::map<std::string, std::string> directory_bytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      out[std::filesystem::relative(entry.path(), dir).string()] = read_file(entry.path());
    }
  }
  return out;
}

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.n_abnormal = 6;
  spec.n_normal = 6;
  spec.n_test_abnormal = 4;
  spec.n_test_normal = 4;
  spec.visual_dim = 16;
  spec.semantic_dim = 16;
  return spec;
}

}  // namespace

TEST_CASE("synthetic generation is byte-deterministic per seed") {
  const auto spec = small_spec();
  const auto a = scratch_dir("synth_a");
  const auto b = scratch_dir("synth_b");
  const auto c = scratch_dir("synth_c");
  write_synthetic(gen_synthetic(7, spec), spec, 7, a);
  write_synthetic(gen_synthetic(7, spec), spec, 7, b);
  write_synthetic(gen_synthetic(8, spec), spec, 8, c);
  const auto bytes_a = directory_bytes(a);
  CHECK(bytes_a.size() == 2 * 20 + 7);  // two feature files per video + 7 metadata files
  CHECK(bytes_a == directory_bytes(b));
  CHECK(bytes_a != directory_bytes(c));
}

TEST_CASE("written synthetic data loads back identically") {
  const auto spec = small_spec();
  const auto data = gen_synthetic(3, spec);
  const auto dir = scratch_dir("synth_load");
  write_synthetic(data, spec, 3, dir);
  const auto manifest = load_manifest(dir / "train_manifest.json", "train");
  REQUIRE(manifest.entries.size() == data.train.size());
  for (std::size_t i = 0; i < data.train.size(); ++i) {
    const auto v = load_video(manifest.entries[i]);
    CHECK(v.video_id == data.train[i].video_id);
    CHECK(v.visual == data.train[i].visual);
    CHECK(v.semantic == data.train[i].semantic);
    CHECK(v.frame_count == data.train[i].frame_count);
  }
  const auto dict = load_dictionary(dir / "prompts.txt", dir / "prompts.lapf");
  CHECK(dict.texts == data.dictionary.texts);
  CHECK(dict.embeddings.isApprox(data.dictionary.embeddings, 1e-6));
  CHECK(load_ground_truth(dir / "ground_truth.json").intervals == data.truth.intervals);
}

TEST_CASE("planted windows carry their prompt") {
  SyntheticSpec spec;  // defaults, sigma = 0.1
  const auto data = gen_synthetic(0, spec);
  Index planted_rows = 0, own_best = 0, abnormal_videos = 0, modal_hits = 0;
  for (const auto* split : {&data.train, &data.test}) {
    for (const auto& video : *split) {
      if (video.label != 1) continue;
      ++abnormal_videos;
      const Index prompt = data.planted_prompt.at(video.video_id);
      const auto [begin, end] = data.planted_window.at(video.video_id);
      const auto psi = anomaly_matrix(video.semantic, data.dictionary);
      const auto ev = anomaly_vector(psi.middleRows(begin, end - begin));
      std::vector<Index> counts(spec.prompts, 0);
      for (Index i = 0; i < ev.best_prompt.size(); ++i) {
        ++planted_rows;
        own_best += ev.best_prompt(i) == prompt;
        ++counts[ev.best_prompt(i)];
      }
      modal_hits += std::max_element(counts.begin(), counts.end()) - counts.begin() == prompt;
    }
  }
  CHECK(static_cast<double>(own_best) / planted_rows >= 0.95);
  CHECK(static_cast<double>(modal_hits) / abnormal_videos >= 0.90);
}

TEST_CASE("anomalous fraction matches the requested fraction") {
  SyntheticSpec spec;
  spec.anomaly_fraction = 0.25;
  const auto data = gen_synthetic(4, spec);
  for (const auto& video : data.train) {
    if (video.label != 1) {
      CHECK(data.truth.intervals.count(video.video_id) == 0);
      continue;
    }
    const auto [begin, end] = data.planted_window.at(video.video_id);
    const double expected = spec.anomaly_fraction * static_cast<double>(video.snippets());
    CHECK(std::abs(static_cast<double>(end - begin) - expected) <= 1.0);
    const auto labels = data.truth.frame_labels(video.video_id, video.frame_count);
    const double frames_abnormal = labels.sum();
    CHECK(std::abs(frames_abnormal - expected * spec.frames_per_snippet) <=
          2.0 * spec.frames_per_snippet);
  }
}

TEST_CASE("synthetic spec validation") {
  SyntheticSpec spec;
  spec.n_abnormal = 0;
  CHECK_THROWS_AS(gen_synthetic(0, spec), Error);
  spec = {};
  spec.prompts = 1;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = {};
  spec.anomaly_fraction = 1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = {};
  spec.min_snippets = 100;
  CHECK_THROWS_AS(spec.validate(), Error);
}
