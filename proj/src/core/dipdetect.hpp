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

#ifndef ECDETECT_CORE_DIPDETECT_HPP_
#define ECDETECT_CORE_DIPDETECT_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"

namespace ecd::dipdetect {

// Per-second fraction of starting listeners still listening.
struct RetentionCurve {
  std::string episode_id;
  std::vector<double> values;
  std::optional<long long> listener_count;
};

struct Dip {
  double peak_s = 0.0;
  double start_s = 0.0;
  double end_s = 0.0;
  double start_slope = 0.0;
  double end_slope = 0.0;

  // False when retention keeps falling after the peak (listeners abandon the
  // episode); end_s is then only the flattest point of the decline.
  bool recovered() const { return end_slope > 0.0; }
};

struct DipSegment {
  std::string episode_id;
  double window_start_s = 0.0;
  double window_end_s = 0.0;
  std::vector<corpus::Sentence> sentences;
  Dip dip;
};

struct DipOptions {
  double min_prominence = 0.01;
  std::size_t min_distance_s = 60;
  std::size_t window_s = 120;
  long long min_listeners = 100;
  double pre_s = 60.0;
  double post_s = 90.0;
};

struct BoundaryError {
  std::size_t start_err_words = 0;
  std::size_t end_err_words = 0;
};

// Throws Error(kInvalidArgument) for an empty curve or values outside [0, 1].
void validate(const RetentionCurve& curve);

std::vector<RetentionCurve> parse_retention(std::istream& in,
                                            std::string_view name);
std::vector<RetentionCurve> load_retention(const std::filesystem::path& path);

// Local maxima of the negated signal. Flat plateaus report their middle
// sample (left-biased), and the two end samples are never peaks.
std::vector<std::size_t> local_maxima(std::span<const double> signal);

// Height of each peak above the higher of its two bounding saddles.
std::vector<double> prominences(std::span<const double> signal,
                                std::span<const std::size_t> peaks);

// Seconds at which retention has a dip: peaks of the negated curve with
// prominence >= min_prominence. When two peaks are closer than
// min_distance_s the more prominent one wins. Sorted ascending.
std::vector<std::size_t> find_dip_peaks(const RetentionCurve& curve,
                                        double min_prominence,
                                        std::size_t min_distance_s);

// Dip start is the point before the peak whose secant to the peak falls
// most steeply; dip end is the point after whose secant rises most steeply.
// Candidates lie within window_s seconds of the peak, clamped to the curve.
// Ties go to the candidate nearest the peak.
Dip estimate_dip_bounds(const RetentionCurve& curve, std::size_t peak_s,
                        std::size_t window_s = 120);

DipSegment extract_segment(const Dip& dip, const corpus::Episode& episode,
                           std::span<const corpus::Sentence> sentences,
                           double pre_s = 60.0, double post_s = 90.0);
DipSegment extract_segment(const Dip& dip, const corpus::Episode& episode);

// Index of the word nearest to time t (containing interval first, then
// closest edge, ties to the lower index).
std::size_t word_at_time(std::span<const corpus::Word> words, double t);

BoundaryError boundary_word_error(const DipSegment& predicted,
                                  const corpus::Span& gold_span,
                                  const corpus::Episode& episode);

// Full detection for one episode. Curves with fewer listeners than
// opts.min_listeners yield nothing.
std::vector<DipSegment> detect_segments(const RetentionCurve& curve,
                                        const corpus::Episode& episode,
                                        std::span<const corpus::Sentence> sentences,
                                        const DipOptions& opts);

}  // namespace ecd::dipdetect

#endif  // ECDETECT_CORE_DIPDETECT_HPP_
