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

#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "lap/feature_file.hpp"
#include "lap/prompts.hpp"
#include "test_util.hpp"

namespace {

using namespace lap;
using lap::testing::random_matrix;
using lap::testing::scratch_dir;

PromptDictionary dict_of(const Matrix<double>& e) {
  std::vector<std::string> texts;
  for (Index i = 0; i < e.rows(); ++i) texts.push_back("prompt " + std::to_string(i));
  return embed_dictionary(texts, e);
}

// Per-element cosine computed with explicit loops.
Matrix<double> cosine_oracle(const Matrix<double>& t, const Matrix<double>& e) {
  Matrix<double> out(t.rows(), e.rows());
  for (Index i = 0; i < t.rows(); ++i) {
    for (Index j = 0; j < e.rows(); ++j) {
      double dot = 0, nt = 0, ne = 0;
      for (Index k = 0; k < t.cols(); ++k) {
        dot += t(i, k) * e(j, k);
        nt += t(i, k) * t(i, k);
        ne += e(j, k) * e(j, k);
      }
      out(i, j) = nt == 0 ? 0.0 : dot / (std::sqrt(nt) * std::sqrt(ne));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("dictionary loading") {
  const auto dir = scratch_dir("prompts");
  std::mt19937_64 rng(1);
  SUBCASE("default dictionary has 30 prompts") {
    const auto& texts = default_prompt_texts();
    CHECK(texts.size() == 30);
    std::ofstream out(dir / "p.txt");
    for (const auto& t : texts) out << t << "\n\n";
    out.close();
    write_feature_file(dir / "p.lapf", random_matrix(30, 12, rng));
    const auto dict = load_dictionary(dir / "p.txt", dir / "p.lapf");
    CHECK(dict.size() == 30);
    CHECK(dict.dim() == 12);
    CHECK(dict.texts == texts);
  }
  SUBCASE("a custom dictionary of 25 prompts") {
    std::ofstream out(dir / "p.txt");
    for (int i = 0; i < 25; ++i) out << "event " << i << "\n";
    out.close();
    write_feature_file(dir / "p.lapf", random_matrix(25, 8, rng));
    CHECK(load_dictionary(dir / "p.txt", dir / "p.lapf").size() == 25);
  }
  SUBCASE("text and embedding counts must agree") {
    std::ofstream(dir / "p.txt") << "a\nb\nc\n";
    write_feature_file(dir / "p.lapf", random_matrix(4, 8, rng));
    CHECK_THROWS_WITH_AS(load_dictionary(dir / "p.txt", dir / "p.lapf"), doctest::Contains("3"),
                         Error);
  }
  SUBCASE("zero-norm prompt rows are rejected") {
    Matrix<double> e = random_matrix(3, 4, rng);
    e.row(1).setZero();
    CHECK_THROWS_AS(dict_of(e), Error);
  }
}

TEST_CASE("anomaly matrix worked examples") {
  Matrix<double> e(1, 2);
  e << 1, 0;
  const auto dict = dict_of(e);
  Matrix<double> t(2, 2);
  t << 3, 0, 0, 2;
  const auto psi = anomaly_matrix(t, dict);
  CHECK(psi(0, 0) == doctest::Approx(1.0));
  CHECK(psi(1, 0) == doctest::Approx(0.0));

  Matrix<double> e2(2, 2);
  e2 << 1, 0, 1, 1;
  Matrix<double> t2(1, 2);
  t2 << 0, 1;
  const auto psi2 = anomaly_matrix(t2, dict_of(e2));
  CHECK(psi2(0, 0) == doctest::Approx(0.0));
  CHECK(psi2(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));

  Matrix<double> zero = Matrix<double>::Zero(1, 2);
  CHECK(anomaly_matrix(zero, dict).isZero());
  CHECK_THROWS_AS(anomaly_matrix(Matrix<double>::Ones(1, 3), dict), Error);
}

TEST_CASE("anomaly matrix properties on random inputs") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix<double> t = random_matrix(1 + trial % 9, 6, rng);
    const Matrix<double> e = random_matrix(2 + trial % 5, 6, rng);
    const auto dict = dict_of(e);
    const auto psi = anomaly_matrix(t, dict);
    CHECK((psi - cosine_oracle(t, e)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(psi.cwiseAbs().maxCoeff() <= 1.0);

    const Matrix<double> scaled = scale(rng) * t;
    CHECK((anomaly_matrix(scaled, dict_of(scale(rng) * e)) - psi).cwiseAbs().maxCoeff() < 1e-12);

    // Permuting captions permutes rows; permuting prompts permutes columns.
    Eigen::PermutationMatrix<Eigen::Dynamic> rows(t.rows()), cols(e.rows());
    rows.setIdentity();
    cols.setIdentity();
    std::shuffle(rows.indices().data(), rows.indices().data() + t.rows(), rng);
    std::shuffle(cols.indices().data(), cols.indices().data() + e.rows(), rng);
    const Matrix<double> pt = rows * t;
    const Matrix<double> pe = cols * e;
    CHECK((anomaly_matrix(pt, dict_of(pe)) - rows * psi * cols.transpose()).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("anomaly vector") {
  Matrix<double> psi(3, 3);
  psi << 0.1, 0.7, 0.7,
         -0.5, -0.2, -0.9,
         0.3, 0.3, 0.3;
  const auto av = anomaly_vector(psi);
  CHECK(av.strength == (Vector<double>(3) << 0.7, -0.2, 0.3).finished());
  CHECK(av.best_prompt(0) == 1);  // ties resolve to the smallest index
  CHECK(av.best_prompt(1) == 1);
  CHECK(av.best_prompt(2) == 0);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix<double> m = random_matrix(7, 5, rng);
    const auto v = anomaly_vector(m);
    for (Index i = 0; i < m.rows(); ++i) {
      Index best = 0;
      for (Index j = 1; j < m.cols(); ++j) {
        if (m(i, j) > m(i, best)) best = j;
      }
      CHECK(v.best_prompt(i) == best);
      CHECK(v.strength(i) == m(i, best));
    }
  }
}

TEST_CASE("prompt distribution") {
  const auto dict = dict_of(Matrix<double>::Identity(4, 4));
  IndexVector best(6);
  best << 2, 0, 2, 3, 0, 2;
  const auto hist = prompt_distribution(best, dict);
  REQUIRE(hist.size() == 3);
  CHECK(hist[0].prompt == 2);
  CHECK(hist[0].count == 3);
  CHECK(hist[1].prompt == 0);
  CHECK(hist[2].prompt == 3);
  CHECK(hist[0].text == "prompt 2");
  best(0) = 9;
  CHECK_THROWS_AS(prompt_distribution(best, dict), Error);
}

TEST_CASE("anomaly matrix and vector edge cases") {
  Matrix<double> t(2, 2);
  t << 1, 0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  Matrix<double> m(1, 2);
  m << 0, 1;
  const auto psi = anomaly_matrix(t, dict_of(m));
  CHECK(psi(0, 0) == doctest::Approx(0.0));
  CHECK(psi(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));

  Matrix<double> row(1, 3);
  row << 0.2, 0.9, 0.9;
  CHECK(anomaly_vector(row).strength(0) == 0.9);
  CHECK(anomaly_vector(row).best_prompt(0) == 1);

  Matrix<double> single(3, 1);
  single << 0.4, -0.1, 0.8;
  CHECK(anomaly_vector(single).strength == single.col(0));

  const auto uniform = anomaly_vector(Matrix<double>::Constant(5, 4, 0.3));
  CHECK(uniform.best_prompt.isZero());
  const auto hist = prompt_distribution(uniform.best_prompt, dict_of(Matrix<double>::Identity(4, 4)));
  REQUIRE(hist.size() == 1);
  CHECK(hist[0].prompt == 0);
  CHECK(hist[0].count == 5);
  CHECK_THROWS_AS(anomaly_vector(Matrix<double>(0, 3)), Error);
}
