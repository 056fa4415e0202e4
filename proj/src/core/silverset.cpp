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

#include "core/silverset.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace ecd::silverset {

std::string_view to_string(Marker marker) {
  return marker == Marker::kInDip ? kInDipToken : kOutsideDipToken;
}

Marker parse_marker(std::string_view name) {
  if (name == kInDipToken) return Marker::kInDip;
  if (name == kOutsideDipToken) return Marker::kOutsideDip;
  fail(ErrorCode::kParse, "unknown marker '" + std::string(name) + "'");
}

std::string MarkedSentence::input_text() const {
  return std::string(to_string(marker)) + " " + sentence.text;
}

double interval_distance(double a_start, double a_end, double b_start,
                         double b_end) {
  return std::max({0.0, b_start - a_end, a_start - b_end});
}

std::vector<MarkedSentence> mark_segment(const dipdetect::DipSegment& segment) {
  std::vector<MarkedSentence> out;
  out.reserve(segment.sentences.size());
  for (const auto& s : segment.sentences) {
    MarkedSentence m;
    m.sentence = s;
    const bool timed = s.start_s && s.end_s;
    const bool inside = timed && *s.start_s <= segment.dip.end_s &&
                        *s.end_s >= segment.dip.start_s;
    m.marker = inside ? Marker::kInDip : Marker::kOutsideDip;
    out.push_back(std::move(m));
  }
  return out;
}

std::string strip_marker(std::string_view text) {
  for (std::string_view tok : {kInDipToken, kOutsideDipToken}) {
    if (text.size() > tok.size() && text.substr(0, tok.size()) == tok &&
        text[tok.size()] == ' ') {
      return std::string(text.substr(tok.size() + 1));
    }
    if (text == tok) return std::string();
  }
  return std::string(text);
}

std::vector<SilverRecord> build_silver(const linear::LinearModel& model,
                                       const features::TfidfModel& tfidf,
                                       std::span<const dipdetect::DipSegment> segments,
                                       bool with_context) {
  std::vector<SilverRecord> out;
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const auto& seg = segments[si];
    const auto marked = mark_segment(seg);
    std::vector<std::string> inputs;
    inputs.reserve(marked.size());
    for (const auto& m : marked) inputs.push_back(m.input_text());
    for (std::size_t i = 0; i < marked.size(); ++i) {
      const double p = linear::predict_proba(
          model, features::transform(tfidf, features::make_input(inputs, i, with_context)));
      SilverRecord rec;
      rec.episode_id = seg.episode_id;
      rec.segment_index = si;
      rec.dip_peak_s = seg.dip.peak_s;
      rec.prob = p;
      rec.labeled.sentence = marked[i].sentence;
      rec.labeled.label = p >= 0.5 ? corpus::Label::kEc : corpus::Label::kContent;
      rec.labeled.ec_fraction = rec.labeled.label == corpus::Label::kEc ? 1.0 : 0.0;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<corpus::LabeledSentence> sample_negatives(
    std::span<const corpus::Sentence> sentences,
    std::span<const dipdetect::Dip> dips, double min_gap_s,
    std::optional<std::size_t> cap) {
  std::vector<corpus::LabeledSentence> eligible;
  for (const auto& s : sentences) {
    if (!s.start_s || !s.end_s) continue;
    const bool far = std::all_of(dips.begin(), dips.end(), [&](const dipdetect::Dip& d) {
      return interval_distance(*s.start_s, *s.end_s, d.start_s, d.end_s) >= min_gap_s;
    });
    if (!far) continue;
    corpus::LabeledSentence ls;
    ls.sentence = s;
    ls.ec_fraction = 0.0;
    ls.label = corpus::Label::kContent;
    eligible.push_back(std::move(ls));
  }
  if (!cap || eligible.size() <= *cap) return eligible;

  std::vector<corpus::LabeledSentence> kept;
  kept.reserve(*cap);
  for (std::size_t k = 0; k < *cap; ++k) {
    kept.push_back(eligible[k * eligible.size() / *cap]);
  }
  return kept;
}

std::vector<corpus::LabeledSentence> sample_negatives(
    const corpus::Episode& episode, std::span<const dipdetect::Dip> dips,
    double min_gap_s, std::optional<std::size_t> cap) {
  const auto sentences = corpus::segment_transcript(episode.words);
  return sample_negatives(sentences, dips, min_gap_s, cap);
}

}  // namespace ecd::silverset
