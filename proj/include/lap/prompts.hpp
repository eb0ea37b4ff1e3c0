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
#include <string>
#include <vector>

#include "lap/core.hpp"

namespace lap {

// Ordered anomaly-event sentences and their sentence embeddings (one row per
// prompt). Embeddings are produced offline by the same sentence encoder that
// embeds the snippet captions.
struct PromptDictionary {
  std::vector<std::string> texts;
  Matrix<double> embeddings;  // P x d_t

  Index size() const { return embeddings.rows(); }
  Index dim() const { return embeddings.cols(); }
};

PromptDictionary embed_dictionary(std::vector<std::string> texts, Matrix<double> embeddings);

// One prompt per non-empty line, order preserved.
std::vector<std::string> read_prompt_texts(const std::filesystem::path& path);

PromptDictionary load_dictionary(const std::filesystem::path& text_path,
                                 const std::filesystem::path& embeddings_path);

// The 30 sentence prompts shipped as data/prompts_default.txt.
const std::vector<std::string>& default_prompt_texts();

/// Cosine similarity between every caption row and every prompt row.
/// Zero-norm caption rows produce a zero row.
template <typename Derived>
Matrix<typename Derived::Scalar> anomaly_matrix(const Eigen::MatrixBase<Derived>& captions,
                                                const PromptDictionary& dict) {
  using Scalar = typename Derived::Scalar;
  require(captions.cols() == dict.dim(),
          "anomaly_matrix: caption dim " + std::to_string(captions.cols()) +
              " does not match prompt dim " + std::to_string(dict.dim()));
  const Matrix<Scalar> prompts = dict.embeddings.template cast<Scalar>();
  const Vector<Scalar> prompt_norms = prompts.rowwise().norm();
  Vector<Scalar> row_norms = captions.rowwise().norm();
  Vector<Scalar> inv_rows =
      row_norms.unaryExpr([](Scalar n) { return n > Scalar(0) ? Scalar(1) / n : Scalar(0); });
  Matrix<Scalar> psi = inv_rows.asDiagonal() * (captions * prompts.transpose()) *
                       prompt_norms.cwiseInverse().asDiagonal();
  return psi.cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));
}

template <typename Scalar>
struct AnomalyVector {
  Vector<Scalar> strength;  // c: row maximum of psi
  IndexVector best_prompt;  // smallest column attaining the maximum
};

template <typename Derived>
AnomalyVector<typename Derived::Scalar> anomaly_vector(const Eigen::MatrixBase<Derived>& psi) {
  require(psi.rows() >= 1 && psi.cols() >= 1, "anomaly_vector: empty matrix");
  AnomalyVector<typename Derived::Scalar> out;
  out.strength.resize(psi.rows());
  out.best_prompt.resize(psi.rows());
  for (Index i = 0; i < psi.rows(); ++i) {
    Index arg = 0;
    // maxCoeff returns the first maximal index, which is the tie rule we want.
    out.strength(i) = psi.row(i).maxCoeff(&arg);
    out.best_prompt(i) = arg;
  }
  return out;
}

struct AnomalyEvidence {
  Matrix<double> psi;
  Vector<double> strength;
  IndexVector best_prompt;
  Eigen::VectorXi pseudo_labels;  // empty until labelled
};

AnomalyEvidence compute_evidence(const Matrix<double>& captions, const PromptDictionary& dict);

struct PromptCount {
  Index prompt = 0;
  std::string text;
  Index count = 0;
};

// Best-prompt histogram over the supplied assignments, sorted by descending
// count then ascending prompt index. Prompts never matched are omitted.
std::vector<PromptCount> prompt_distribution(const IndexVector& best_prompt,
                                             const PromptDictionary& dict);

}  // namespace lap
