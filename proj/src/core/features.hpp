// Copyright 2026 The ecdetect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ECDETECT_CORE_FEATURES_HPP_
#define ECDETECT_CORE_FEATURES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core/corpus.hpp"
#include "json.hpp"

namespace ecd::features {

// Stands in for the missing previous sentence of a document's first sentence.
inline constexpr std::string_view kStartToken = "__START__";

inline constexpr int kTfidfFormatVersion = 1;

// Sparse vector sorted by column, zero entries never stored.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const { return entries.empty(); }
  double norm() const;
};

struct TfidfModel {
  int ngram_max = 1;
  std::unordered_map<std::string, std::uint32_t> vocabulary;
  std::vector<double> idf;
  std::size_t doc_count = 0;

  std::size_t size() const { return idf.size(); }
};

// Lowercases, splits on whitespace and trims punctuation from both ends of
// each token. kStartToken passes through unchanged.
std::vector<std::string> tokenize(std::string_view text);

// All n-grams with 1 <= n <= ngram_max, joined by a single space.
std::vector<std::string> extract_ngrams(std::span<const std::string> tokens,
                                        int ngram_max);

std::string make_input(std::span<const std::string> texts, std::size_t i,
                       bool with_context);
std::string make_input(std::span<const corpus::Sentence> sentences,
                       std::size_t i, bool with_context);

// Vocabulary keeps terms with document frequency >= min_df, indexed in
// lexicographic order. idf(t) = ln((1 + N) / (1 + df(t))) + 1.
TfidfModel fit_tfidf(std::span<const std::string> texts, int ngram_max,
                     std::size_t min_df = 2);

// Term counts times idf, L2-normalised. Unknown terms are dropped.
FeatureVector transform(const TfidfModel& model, std::string_view text);

nlohmann::json to_json(const TfidfModel& model);
TfidfModel tfidf_from_json(const nlohmann::json& j);

}  // namespace ecd::features

#endif  // ECDETECT_CORE_FEATURES_HPP_
