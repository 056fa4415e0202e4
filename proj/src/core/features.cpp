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

#include "core/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "core/error.hpp"

namespace ecd::features {
namespace {

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

double FeatureVector::norm() const {
  double sq = 0.0;
  for (const auto& [idx, w] : entries) sq += w * w;
  return std::sqrt(sq);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_ascii_space(text[j])) ++j;
    if (j > i) {
      std::string_view raw = text.substr(i, j - i);
      if (raw == kStartToken) {
        out.emplace_back(raw);
      } else {
        std::size_t b = 0;
        std::size_t e = raw.size();
        while (b < e && is_ascii_punct(raw[b])) ++b;
        while (e > b && is_ascii_punct(raw[e - 1])) --e;
        if (b < e) {
          std::string tok(raw.substr(b, e - b));
          for (char& c : tok) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
          }
          out.push_back(std::move(tok));
        }
      }
    }
    i = j;
  }
  return out;
}

std::vector<std::string> extract_ngrams(std::span<const std::string> tokens,
                                        int ngram_max) {
  std::vector<std::string> out;
  for (int n = 1; n <= ngram_max; ++n) {
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < len; ++k) {
        gram.push_back(' ');
        gram += tokens[i + k];
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

std::string make_input(std::span<const std::string> texts, std::size_t i,
                       bool with_context) {
  if (i >= texts.size()) {
    fail(ErrorCode::kInvalidArgument,
         "sentence index " + std::to_string(i) + " out of range");
  }
  if (!with_context) return texts[i];
  const std::string prev = i == 0 ? std::string(kStartToken) : texts[i - 1];
  return prev + " " + texts[i];
}

std::string make_input(std::span<const corpus::Sentence> sentences,
                       std::size_t i, bool with_context) {
  if (i >= sentences.size()) {
    fail(ErrorCode::kInvalidArgument,
         "sentence index " + std::to_string(i) + " out of range");
  }
  if (!with_context) return sentences[i].text;
  const std::string prev =
      i == 0 ? std::string(kStartToken) : sentences[i - 1].text;
  return prev + " " + sentences[i].text;
}

TfidfModel fit_tfidf(std::span<const std::string> texts, int ngram_max,
                     std::size_t min_df) {
  if (texts.empty()) fail(ErrorCode::kInvalidArgument, "empty corpus");
  if (ngram_max != 1 && ngram_max != 2) {
    fail(ErrorCode::kInvalidArgument, "ngram_max must be 1 or 2");
  }
  std::map<std::string, std::size_t> df;
  for (const std::string& text : texts) {
    const auto grams = extract_ngrams(tokenize(text), ngram_max);
    const std::set<std::string> unique(grams.begin(), grams.end());
    for (const auto& g : unique) ++df[g];
  }

  TfidfModel model;
  model.ngram_max = ngram_max;
  model.doc_count = texts.size();
  const double n = static_cast<double>(texts.size());
  for (const auto& [term, count] : df) {
    if (count < min_df) continue;
    model.vocabulary.emplace(term, static_cast<std::uint32_t>(model.idf.size()));
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) +
                        1.0);
  }
  return model;
}

FeatureVector transform(const TfidfModel& model, std::string_view text) {
  std::map<std::uint32_t, double> counts;
  for (const auto& g : extract_ngrams(tokenize(text), model.ngram_max)) {
    auto it = model.vocabulary.find(g);
    if (it != model.vocabulary.end()) counts[it->second] += 1.0;
  }
  FeatureVector fv;
  double sq = 0.0;
  for (const auto& [idx, c] : counts) {
    const double w = c * model.idf[idx];
    if (w == 0.0) continue;
    fv.entries.emplace_back(idx, w);
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : fv.entries) e.second *= inv;
  }
  return fv;
}

nlohmann::json to_json(const TfidfModel& model) {
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& [term, idx] : model.vocabulary) vocab[term] = idx;
  return {{"version", kTfidfFormatVersion},
          {"ngram_max", model.ngram_max},
          {"vocab", std::move(vocab)},
          {"idf", model.idf},
          {"doc_count", model.doc_count}};
}

TfidfModel tfidf_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kTfidfFormatVersion) {
    fail(ErrorCode::kParse, "unsupported tf-idf model version");
  }
  TfidfModel m;
  m.ngram_max = j.at("ngram_max").get<int>();
  m.idf = j.at("idf").get<std::vector<double>>();
  m.doc_count = j.at("doc_count").get<std::size_t>();
  for (const auto& [term, idx] : j.at("vocab").items()) {
    const auto i = idx.get<std::uint32_t>();
    if (i >= m.idf.size()) {
      fail(ErrorCode::kParse, "vocabulary index " + std::to_string(i) +
                                  " has no idf entry");
    }
    m.vocabulary.emplace(term, i);
  }
  return m;
}

}  // namespace ecd::features
