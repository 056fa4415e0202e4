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

#ifndef ECDETECT_CORE_CORPUS_HPP_
#define ECDETECT_CORE_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecd::corpus {

// Allowed overlap between consecutive ASR word timings, in seconds.
inline constexpr double kWordTimeJitterS = 0.5;

// Punctuation-free ASR runs are cut into sentences of at most this many words.
inline constexpr std::size_t kMaxTranscriptSentenceWords = 150;

struct Word {
  std::string token;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct Episode {
  std::string id;
  std::string description;
  std::vector<Word> words;
  std::optional<std::string> retention_curve_id;

  // End time of the last transcript word, 0 for an empty transcript.
  double duration_s() const;
};

enum class Source { kDescription, kTranscript };

std::string_view to_string(Source source);
Source parse_source(std::string_view name);

// Half-open range of Unicode scalar offsets into one source text.
struct Span {
  Source source = Source::kDescription;
  std::size_t start_char = 0;
  std::size_t end_char = 0;
};

struct Annotation {
  std::string episode_id;
  Source source = Source::kDescription;
  std::vector<Span> spans;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  std::size_t start_char = 0;
  std::size_t end_char = 0;
  // Transcript sentences only.
  std::optional<double> start_s;
  std::optional<double> end_s;
  std::size_t first_word = 0;
  std::size_t word_count = 0;
};

enum class Label { kContent, kEc };

std::string_view to_string(Label label);
Label parse_label(std::string_view name);

struct LabeledSentence {
  Sentence sentence;
  double ec_fraction = 0.0;
  Label label = Label::kContent;
};

std::vector<Episode> parse_episodes(std::istream& in, std::string_view name);
std::vector<Episode> load_episodes(const std::filesystem::path& path);
std::vector<Annotation> parse_annotations(std::istream& in,
                                          std::string_view name);
std::vector<Annotation> load_annotations(const std::filesystem::path& path);

// Rule-based splitter for creator-written descriptions. Splits after terminal
// punctuation (. ! ?) that is followed by whitespace, and on runs of three or
// more '-', '.', or ' ' characters, which are dropped from the output.
std::vector<Sentence> segment_description(std::string_view text);

// Words joined with single spaces; the coordinate system for transcript spans.
std::string transcript_text(std::span<const Word> words);

std::vector<Sentence> segment_transcript(std::span<const Word> words);

// ec_fraction is the share of the sentence's characters covered by the union
// of `spans`; a sentence is EC only when that share is strictly above 0.5.
// Throws Error(kInvalidArgument) for spans outside [0, source_length].
std::vector<LabeledSentence> label_sentences(std::span<const Sentence> sentences,
                                             std::span<const Span> spans,
                                             std::size_t source_length);

}  // namespace ecd::corpus

#endif  // ECDETECT_CORE_CORPUS_HPP_
