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

#include "core/dipdetect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "core/error.hpp"
#include "core/jsonl.hpp"
#include "core/utf8.hpp"

namespace ecd::dipdetect {
namespace {

std::vector<double> negate(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return -x; });
  return out;
}

}  // namespace

void validate(const RetentionCurve& curve) {
  if (curve.values.empty()) {
    fail(ErrorCode::kInvalidArgument,
         "retention curve for '" + curve.episode_id + "' is empty");
  }
  for (double v : curve.values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "retention curve for '" +
                                            curve.episode_id +
                                            "' has a value outside [0, 1]");
    }
  }
}

std::vector<RetentionCurve> parse_retention(std::istream& in,
                                            std::string_view name) {
  std::vector<RetentionCurve> out;
  jsonl::for_each_record(in, name, [&](const jsonl::json& j, std::size_t) {
    RetentionCurve c;
    c.episode_id = j.at("episode_id").get<std::string>();
    if (j.contains("listener_count") && !j.at("listener_count").is_null()) {
      c.listener_count = j.at("listener_count").get<long long>();
    }
    c.values = j.at("values").get<std::vector<double>>();
    try {
      validate(c);
    } catch (const Error& e) {
      fail(ErrorCode::kParse, e.what());
    }
    out.push_back(std::move(c));
  });
  return out;
}

std::vector<RetentionCurve> load_retention(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return parse_retention(in, path.string());
}

std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> peaks;
  if (x.size() < 3) return peaks;
  const std::size_t last = x.size() - 1;
  std::size_t i = 1;
  while (i < last) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead < last && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        peaks.push_back((i + ahead - 1) / 2);
        i = ahead;
      }
    }
    ++i;
  }
  return peaks;
}

std::vector<double> prominences(std::span<const double> x,
                                std::span<const std::size_t> peaks) {
  std::vector<double> out;
  out.reserve(peaks.size());
  for (std::size_t p : peaks) {
    const double h = x[p];
    double left_min = h;
    for (std::size_t i = p + 1; i-- > 0;) {
      if (x[i] > h) break;
      left_min = std::min(left_min, x[i]);
    }
    double right_min = h;
    for (std::size_t i = p; i < x.size(); ++i) {
      if (x[i] > h) break;
      right_min = std::min(right_min, x[i]);
    }
    out.push_back(h - std::max(left_min, right_min));
  }
  return out;
}

std::vector<std::size_t> find_dip_peaks(const RetentionCurve& curve,
                                        double min_prominence,
                                        std::size_t min_distance_s) {
  validate(curve);
  if (!(min_prominence > 0.0) || min_distance_s < 1) {
    fail(ErrorCode::kInvalidArgument,
         "min_prominence must be > 0 and min_distance_s >= 1");
  }
  const std::vector<double> neg = negate(curve.values);
  const std::vector<std::size_t> candidates = local_maxima(neg);
  const std::vector<double> prom = prominences(neg, candidates);

  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (prom[k] >= min_prominence) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return prom[a] > prom[b]; });

  std::vector<std::size_t> kept;
  for (std::size_t k : order) {
    const std::size_t p = candidates[k];
    const bool too_close = std::any_of(kept.begin(), kept.end(), [&](std::size_t q) {
      const std::size_t d = p > q ? p - q : q - p;
      return d < min_distance_s;
    });
    if (!too_close) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

Dip estimate_dip_bounds(const RetentionCurve& curve, std::size_t peak_s,
                        std::size_t window_s) {
  validate(curve);
  const std::vector<double>& v = curve.values;
  if (peak_s >= v.size()) {
    fail(ErrorCode::kInvalidArgument, "peak lies outside the curve");
  }
  if (window_s == 0) fail(ErrorCode::kInvalidArgument, "window must be positive");
  const std::size_t lo = peak_s >= window_s ? peak_s - window_s : 0;
  const std::size_t hi = std::min(v.size() - 1, peak_s + window_s);
  if (lo == peak_s || hi == peak_s) {
    fail(ErrorCode::kInvalidArgument,
         "peak at " + std::to_string(peak_s) +
             " s has no candidate points on one side");
  }

  const double at_peak = v[peak_s];
  Dip dip;
  dip.peak_s = static_cast<double>(peak_s);

  // Scanning outward from the peak with strict comparisons keeps the nearest
  // candidate on ties.
  std::size_t start = peak_s - 1;
  double start_slope = at_peak - v[start];
  for (std::size_t t = peak_s - 1; t-- > lo;) {
    const double slope = (at_peak - v[t]) / static_cast<double>(peak_s - t);
    if (slope < start_slope) {
      start_slope = slope;
      start = t;
    }
  }
  std::size_t end = peak_s + 1;
  double end_slope = v[end] - at_peak;
  for (std::size_t t = peak_s + 2; t <= hi; ++t) {
    const double slope = (v[t] - at_peak) / static_cast<double>(t - peak_s);
    if (slope > end_slope) {
      end_slope = slope;
      end = t;
    }
  }
  dip.start_s = static_cast<double>(start);
  dip.end_s = static_cast<double>(end);
  dip.start_slope = start_slope;
  dip.end_slope = end_slope;
  return dip;
}

DipSegment extract_segment(const Dip& dip, const corpus::Episode& episode,
                           std::span<const corpus::Sentence> sentences,
                           double pre_s, double post_s) {
  DipSegment seg;
  seg.episode_id = episode.id;
  seg.dip = dip;
  seg.window_start_s = std::max(0.0, dip.start_s - pre_s);
  seg.window_end_s = dip.end_s + post_s;
  if (!episode.words.empty()) {
    seg.window_end_s = std::min(seg.window_end_s, episode.duration_s());
  }
  seg.window_end_s = std::max(seg.window_end_s, seg.window_start_s);
  for (const corpus::Sentence& s : sentences) {
    if (!s.start_s || !s.end_s) continue;
    if (*s.start_s <= seg.window_end_s && *s.end_s >= seg.window_start_s) {
      seg.sentences.push_back(s);
    }
  }
  return seg;
}

DipSegment extract_segment(const Dip& dip, const corpus::Episode& episode) {
  const auto sentences = corpus::segment_transcript(episode.words);
  return extract_segment(dip, episode, sentences);
}

std::size_t word_at_time(std::span<const corpus::Word> words, double t) {
  if (words.empty()) fail(ErrorCode::kInvalidArgument, "empty transcript");
  std::size_t best = 0;
  double best_dist = INFINITY;
  for (std::size_t i = 0; i < words.size(); ++i) {
    double d = 0.0;
    if (t < words[i].start_s) {
      d = words[i].start_s - t;
    } else if (t > words[i].end_s) {
      d = t - words[i].end_s;
    }
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

BoundaryError boundary_word_error(const DipSegment& predicted,
                                  const corpus::Span& gold_span,
                                  const corpus::Episode& episode) {
  const auto& words = episode.words;
  if (words.empty()) fail(ErrorCode::kInvalidArgument, "empty transcript");
  if (gold_span.source != corpus::Source::kTranscript) {
    fail(ErrorCode::kInvalidArgument, "gold span must be on the transcript");
  }

  // Word w covers code points [begin[w], begin[w] + len[w]).
  std::vector<std::size_t> begin(words.size());
  std::vector<std::size_t> end(words.size());
  std::size_t offset = 0;
  for (std::size_t w = 0; w < words.size(); ++w) {
    begin[w] = offset;
    end[w] = offset + utf8::length(words[w].token);
    offset = end[w] + 1;
  }
  if (gold_span.start_char >= gold_span.end_char || gold_span.end_char > offset - 1) {
    fail(ErrorCode::kInvalidArgument, "gold span outside the transcript");
  }
  // First word ending after start_char; last word starting before end_char.
  std::size_t gold_start = 0;
  while (gold_start + 1 < words.size() && end[gold_start] <= gold_span.start_char) {
    ++gold_start;
  }
  std::size_t gold_end = words.size() - 1;
  while (gold_end > 0 && begin[gold_end] >= gold_span.end_char) --gold_end;

  const std::size_t dip_start = word_at_time(words, predicted.dip.start_s);
  const std::size_t dip_end = word_at_time(words, predicted.dip.end_s);
  auto absdiff = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
  return BoundaryError{absdiff(dip_start, gold_start), absdiff(dip_end, gold_end)};
}

std::vector<DipSegment> detect_segments(const RetentionCurve& curve,
                                        const corpus::Episode& episode,
                                        std::span<const corpus::Sentence> sentences,
                                        const DipOptions& opts) {
  std::vector<DipSegment> out;
  if (curve.listener_count && *curve.listener_count < opts.min_listeners) {
    return out;
  }
  for (std::size_t peak :
       find_dip_peaks(curve, opts.min_prominence, opts.min_distance_s)) {
    const Dip dip = estimate_dip_bounds(curve, peak, opts.window_s);
    out.push_back(extract_segment(dip, episode, sentences, opts.pre_s, opts.post_s));
  }
  return out;
}

}  // namespace ecd::dipdetect
