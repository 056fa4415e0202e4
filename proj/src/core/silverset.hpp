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

#ifndef ECDETECT_CORE_SILVERSET_HPP_
#define ECDETECT_CORE_SILVERSET_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"
#include "core/dipdetect.hpp"
#include "core/features.hpp"
#include "core/linear.hpp"

namespace ecd::silverset {

inline constexpr std::string_view kInDipToken = "in-dip";
inline constexpr std::string_view kOutsideDipToken = "outside-dip";

enum class Marker { kInDip, kOutsideDip };

std::string_view to_string(Marker marker);
Marker parse_marker(std::string_view name);

struct MarkedSentence {
  corpus::Sentence sentence;
  Marker marker = Marker::kOutsideDip;
  std::optional<corpus::Label> silver_label;

  // "<marker> <text>", the classifier input.
  std::string input_text() const;
};

struct SilverRecord {
  std::string episode_id;
  std::optional<std::size_t> segment_index;  // unset for negative samples
  std::optional<double> dip_peak_s;
  corpus::LabeledSentence labeled;
  double prob = 0.0;  // classifier probability; 0 for negative samples
};

// Distance between closed intervals, 0 when they intersect.
double interval_distance(double a_start, double a_end, double b_start,
                         double b_end);

// A sentence is in-dip when its time bounds intersect [dip.start_s, dip.end_s].
std::vector<MarkedSentence> mark_segment(const dipdetect::DipSegment& segment);

// Removes a leading marker token and the space after it.
std::string strip_marker(std::string_view text);

// Labels every sentence of every segment with the model's prediction on the
// marked (and optionally context-augmented) input. Output text is the
// original sentence text.
std::vector<SilverRecord> build_silver(const linear::LinearModel& model,
                                       const features::TfidfModel& tfidf,
                                       std::span<const dipdetect::DipSegment> segments,
                                       bool with_context = false);

// Content-labelled sentences at least min_gap_s away from every dip's
// [start_s, end_s]. With a cap, an evenly spaced subset of that size is kept.
std::vector<corpus::LabeledSentence> sample_negatives(
    std::span<const corpus::Sentence> sentences,
    std::span<const dipdetect::Dip> dips, double min_gap_s = 300.0,
    std::optional<std::size_t> cap = std::nullopt);
std::vector<corpus::LabeledSentence> sample_negatives(
    const corpus::Episode& episode, std::span<const dipdetect::Dip> dips,
    double min_gap_s = 300.0, std::optional<std::size_t> cap = std::nullopt);

}  // namespace ecd::silverset

#endif  // ECDETECT_CORE_SILVERSET_HPP_
