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

#include "lap/prompts.hpp"

#include <algorithm>
#include <fstream>

#include "lap/feature_file.hpp"

namespace lap {

PromptDictionary embed_dictionary(std::vector<std::string> texts, Matrix<double> embeddings) {
  require(!texts.empty(), "prompt dictionary is empty");
  require(static_cast<Index>(texts.size()) == embeddings.rows(),
          "prompt dictionary has " + std::to_string(texts.size()) + " texts but " +
              std::to_string(embeddings.rows()) + " embedding rows");
  require(embeddings.allFinite(), "prompt embeddings contain non-finite values");
  for (Index j = 0; j < embeddings.rows(); ++j) {
    require(embeddings.row(j).squaredNorm() > 0.0,
            "prompt " + std::to_string(j) + " (\"" + texts[j] + "\") has a zero-norm embedding");
  }
  return {std::move(texts), std::move(embeddings)};
}

std::vector<std::string> read_prompt_texts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": cannot open prompt file");
  std::vector<std::string> texts;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) texts.push_back(line);
  }
  return texts;
}

PromptDictionary load_dictionary(const std::filesystem::path& text_path,
                                 const std::filesystem::path& embeddings_path) {
  return embed_dictionary(read_prompt_texts(text_path), read_feature_file(embeddings_path));
}

const std::vector<std::string>& default_prompt_texts() {
  static const std::vector<std::string> texts = {
      "A man is shooting a gun",
      "Something is on fire",
      "A person is punching another person",
      "People are fighting on the street",
      "A car crashes into another car",
      "A person falls down on the ground",
      "A man is holding a knife",
      "A building is exploding",
      "Smoke is rising from a car",
      "A person is stealing from a store",
      "A man is breaking a window",
      "A person is robbing someone",
      "A crowd is rioting in the street",
      "A car hits a pedestrian",
      "A person is being attacked",
      "A man is kicking a person",
      "Someone is vandalizing a car",
      "A person is being arrested by the police",
      "A truck overturns on the road",
      "A motorcycle crashes on the road",
      "A person is breaking into a house",
      "A man is pointing a gun at someone",
      "A fire is burning in a building",
      "A person is abusing an animal",
      "Police cars are chasing a car",
      "A person is lying injured on the ground",
      "A man is hitting someone with a stick",
      "A car is driving on the wrong side of the road",
      "People are running away in panic",
      "A vehicle is on fire on the highway",
  };
  return texts;
}

AnomalyEvidence compute_evidence(const Matrix<double>& captions, const PromptDictionary& dict) {
  AnomalyEvidence evidence;
  evidence.psi = anomaly_matrix(captions, dict);
  auto vec = anomaly_vector(evidence.psi);
  evidence.strength = std::move(vec.strength);
  evidence.best_prompt = std::move(vec.best_prompt);
  return evidence;
}

std::vector<PromptCount> prompt_distribution(const IndexVector& best_prompt,
                                             const PromptDictionary& dict) {
  std::vector<Index> counts(dict.size(), 0);
  for (Index i = 0; i < best_prompt.size(); ++i) {
    const Index j = best_prompt(i);
    require(j >= 0 && j < dict.size(), "prompt index out of range: " + std::to_string(j));
    ++counts[j];
  }
  std::vector<PromptCount> hist;
  for (Index j = 0; j < dict.size(); ++j) {
    if (counts[j] > 0) hist.push_back({j, dict.texts[j], counts[j]});
  }
  std::stable_sort(hist.begin(), hist.end(),
                   [](const PromptCount& a, const PromptCount& b) { return a.count > b.count; });
  return hist;
}

}  // namespace lap
