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

#ifndef ECDETECT_CORE_ROUGE_HPP_
#define ECDETECT_CORE_ROUGE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"

namespace ecd::rouge {

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f = 0.0;
  double beta = 1.2;
};

// Lowercase, whitespace split, leading and trailing punctuation characters
// split off as one token each.
std::vector<std::string> tokenize_eval(std::string_view text);

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b);

// F = (1 + beta^2) R P / (R + beta^2 P), 0 when R + P = 0.
double f_measure(double recall, double precision, double beta);

RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference, double beta = 1.2);
RougeScore rouge_l(std::string_view candidate, std::string_view reference,
                   double beta = 1.2);

// Percentage of summaries with at least one EC sentence.
double ec_fraction(std::span<const std::vector<corpus::Label>> summaries);

}  // namespace ecd::rouge

#endif  // ECDETECT_CORE_ROUGE_HPP_
