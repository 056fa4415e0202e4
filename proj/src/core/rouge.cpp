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

#include "core/rouge.hpp"

#include <algorithm>
#include <cctype>

#include "core/error.hpp"

namespace ecd::rouge {
namespace {

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> tokenize_eval(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) {
      std::string_view raw = text.substr(i, j - i);
      std::size_t b = 0;
      std::size_t e = raw.size();
      while (b < e && is_punct(raw[b])) ++b;
      while (e > b && is_punct(raw[e - 1])) --e;
      for (std::size_t k = 0; k < b; ++k) out.emplace_back(1, raw[k]);
      if (b < e) {
        std::string word(raw.substr(b, e - b));
        for (char& c : word) {
          c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        out.push_back(std::move(word));
      }
      for (std::size_t k = std::max(b, e); k < raw.size(); ++k) {
        out.emplace_back(1, raw[k]);
      }
    }
    i = j;
  }
  return out;
}

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double f_measure(double recall, double precision, double beta) {
  const double b2 = beta * beta;
  const double den = recall + b2 * precision;
  return recall + precision > 0.0 && den > 0.0
             ? (1.0 + b2) * recall * precision / den
             : 0.0;
}

RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference, double beta) {
  if (!(beta > 0.0)) fail(ErrorCode::kInvalidArgument, "beta must be > 0");
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  RougeScore s;
  s.beta = beta;
  s.recall = reference.empty() ? 0.0 : lcs / static_cast<double>(reference.size());
  s.precision = candidate.empty() ? 0.0 : lcs / static_cast<double>(candidate.size());
  s.f = f_measure(s.recall, s.precision, beta);
  return s;
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference,
                   double beta) {
  return rouge_l(tokenize_eval(candidate), tokenize_eval(reference), beta);
}

double ec_fraction(std::span<const std::vector<corpus::Label>> summaries) {
  if (summaries.empty()) fail(ErrorCode::kInvalidArgument, "no summaries");
  std::size_t with_ec = 0;
  for (const auto& s : summaries) {
    if (std::find(s.begin(), s.end(), corpus::Label::kEc) != s.end()) ++with_ec;
  }
  return 100.0 * static_cast<double>(with_ec) / static_cast<double>(summaries.size());
}

}  // namespace ecd::rouge
