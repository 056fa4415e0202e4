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

#ifndef ECDETECT_CORE_DOCDECODE_HPP_
#define ECDETECT_CORE_DOCDECODE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/corpus.hpp"

namespace ecd::docdecode {

// Change-point statistics closer than this are treated as ties.
inline constexpr double kLlrTieTolerance = 1e-12;

struct ProbSequence {
  std::string episode_id;
  std::vector<double> probs;  // P(sentence i is EC)
};

struct SmoothingConfig {
  double bandwidth = 1.5;  // in sentences
  double threshold = 0.5;
};

struct ChangePointResult {
  std::optional<std::size_t> tau;  // 1-based; sentences after tau are EC
  std::size_t best_tau = 0;        // argmax of the statistic, accepted or not
  double r_tau = 0.0;
  double theta_pre = 0.0;
  double theta_post = 0.0;
  bool accepted = false;
};

// Throws Error(kInvalidArgument) for empty sequences or values outside [0, 1].
void validate(std::span<const double> probs);

// Nadaraya-Watson regression over sentence index with a Gaussian kernel.
std::vector<double> smooth(std::span<const double> probs, double bandwidth);
ProbSequence smooth(const ProbSequence& seq, const SmoothingConfig& cfg);

std::vector<corpus::Label> threshold_labels(std::span<const double> probs,
                                            double threshold = 0.5);

std::vector<corpus::Label> decode_transcript(const ProbSequence& seq,
                                             const SmoothingConfig& cfg);

// Bernoulli log-likelihood ratio between "one change after tau" and "no
// change" for binary observations, using segment MLEs. tau in [1, n-1].
double change_point_llr(std::span<const unsigned char> x, std::size_t tau);

// Single change point over the binarised sequence (p >= 0.5). Accepted when
// the best statistic reaches min_llr and the EC rate rises after the change.
// Throws Error(kInvalidArgument) when fewer than two sentences are given.
ChangePointResult detect_change_point(const ProbSequence& seq,
                                      double min_llr = 2.0);

// Suffix labelling when a change point is accepted, per-sentence
// thresholding at 0.5 otherwise.
std::vector<corpus::Label> decode_description(const ProbSequence& seq,
                                              double min_llr = 2.0);

bool document_match(std::span<const corpus::Label> pred,
                    std::span<const corpus::Label> gold);

}  // namespace ecd::docdecode

#endif  // ECDETECT_CORE_DOCDECODE_HPP_
