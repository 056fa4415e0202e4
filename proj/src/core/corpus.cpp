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

#include "core/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "core/error.hpp"
#include "core/jsonl.hpp"
#include "core/utf8.hpp"

namespace ecd::corpus {
namespace {

using jsonl::json;

Word parse_word(const json& j) {
  Word w;
  w.token = j.at("t").get<std::string>();
  w.start_s = j.at("s").get<double>();
  w.end_s = j.at("e").get<double>();
  return w;
}

void check_word_times(const std::vector<Word>& words) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!(words[i].start_s <= words[i].end_s)) {
      fail(ErrorCode::kParse, "word " + std::to_string(i) +
                                  " ends before it starts");
    }
    if (i + 1 < words.size() &&
        words[i].end_s > words[i + 1].start_s + kWordTimeJitterS) {
      fail(ErrorCode::kParse, "word " + std::to_string(i) +
                                  " overlaps the next word");
    }
  }
}

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

std::size_t run_length(const std::u32string& s, std::size_t i, char32_t c) {
  std::size_t j = i;
  while (j < s.size() && s[j] == c) ++j;
  return j - i;
}

}  // namespace

double Episode::duration_s() const {
  return words.empty() ? 0.0 : words.back().end_s;
}

std::string_view to_string(Source source) {
  return source == Source::kDescription ? "description" : "transcript";
}

Source parse_source(std::string_view name) {
  if (name == "description") return Source::kDescription;
  if (name == "transcript") return Source::kTranscript;
  fail(ErrorCode::kParse, "unknown source '" + std::string(name) + "'");
}

std::string_view to_string(Label label) {
  return label == Label::kEc ? "EC" : "Content";
}

Label parse_label(std::string_view name) {
  if (name == "EC") return Label::kEc;
  if (name == "Content") return Label::kContent;
  fail(ErrorCode::kParse, "unknown label '" + std::string(name) + "'");
}

std::vector<Episode> parse_episodes(std::istream& in, std::string_view name) {
  std::vector<Episode> episodes;
  std::unordered_set<std::string> seen;
  jsonl::for_each_record(in, name, [&](const json& j, std::size_t) {
    Episode ep;
    ep.id = j.at("id").get<std::string>();
    if (ep.id.empty()) fail(ErrorCode::kParse, "empty episode id");
    ep.description = j.value("description", std::string());
    if (j.contains("words")) {
      for (const auto& w : j.at("words")) ep.words.push_back(parse_word(w));
    }
    check_word_times(ep.words);
    if (j.contains("retention_curve_id") &&
        !j.at("retention_curve_id").is_null()) {
      ep.retention_curve_id = j.at("retention_curve_id").get<std::string>();
    }
    if (!seen.insert(ep.id).second) {
      fail(ErrorCode::kParse, "duplicate episode id '" + ep.id + "'");
    }
    episodes.push_back(std::move(ep));
  });
  return episodes;
}

std::vector<Episode> load_episodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return parse_episodes(in, path.string());
}

std::vector<Annotation> parse_annotations(std::istream& in,
                                          std::string_view name) {
  std::vector<Annotation> out;
  jsonl::for_each_record(in, name, [&](const json& j, std::size_t) {
    Annotation a;
    a.episode_id = j.at("episode_id").get<std::string>();
    a.source = parse_source(j.at("source").get<std::string>());
    for (const auto& s : j.at("spans")) {
      Span span;
      span.source = a.source;
      span.start_char = s.at("start").get<std::size_t>();
      span.end_char = s.at("end").get<std::size_t>();
      if (span.start_char >= span.end_char) {
        fail(ErrorCode::kParse, "span start must precede end");
      }
      a.spans.push_back(span);
    }
    out.push_back(std::move(a));
  });
  return out;
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return parse_annotations(in, path.string());
}

std::vector<Sentence> segment_description(std::string_view text) {
  const std::u32string s = utf8::decode(text);
  std::vector<Sentence> out;

  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && utf8::is_space(s[begin])) ++begin;
    while (end > begin && utf8::is_space(s[end - 1])) --end;
    if (begin == end) return;
    Sentence sent;
    sent.index = out.size();
    sent.start_char = begin;
    sent.end_char = end;
    sent.text = utf8::encode(std::u32string_view(s).substr(begin, end - begin));
    out.push_back(std::move(sent));
  };

  std::size_t frag_start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const char32_t c = s[i];
    if (c == U'-' || c == U'.' || c == U' ') {
      const std::size_t run = run_length(s, i, c);
      if (run >= 3) {
        emit(frag_start, i);
        i += run;
        frag_start = i;
        continue;
      }
    }
    if (is_terminal(c) && i + 1 < s.size() && utf8::is_space(s[i + 1])) {
      emit(frag_start, i + 1);
      ++i;
      frag_start = i;
      continue;
    }
    ++i;
  }
  emit(frag_start, s.size());
  return out;
}

std::string transcript_text(std::span<const Word> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += words[i].token;
  }
  return out;
}

std::vector<Sentence> segment_transcript(std::span<const Word> words) {
  std::vector<Sentence> out;
  std::size_t offset = 0;  // code points
  std::size_t first = 0;
  std::size_t first_offset = 0;
  std::string text;

  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& tok = words[i].token;
    if (i == first) {
      first_offset = offset;
      text.clear();
    } else {
      text.push_back(' ');
    }
    text += tok;
    const std::size_t tok_len = utf8::length(tok);
    offset += tok_len;

    const bool punct = !tok.empty() && is_terminal(static_cast<char32_t>(
                                           static_cast<unsigned char>(tok.back())));
    const std::size_t count = i - first + 1;
    if (punct || count == kMaxTranscriptSentenceWords || i + 1 == words.size()) {
      Sentence sent;
      sent.index = out.size();
      sent.text = text;
      sent.start_char = first_offset;
      sent.end_char = offset;
      sent.start_s = words[first].start_s;
      sent.end_s = words[i].end_s;
      sent.first_word = first;
      sent.word_count = count;
      out.push_back(std::move(sent));
      first = i + 1;
    }
    offset += 1;  // joining space
  }
  return out;
}

std::vector<LabeledSentence> label_sentences(std::span<const Sentence> sentences,
                                             std::span<const Span> spans,
                                             std::size_t source_length) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  ranges.reserve(spans.size());
  for (const Span& sp : spans) {
    if (sp.start_char >= sp.end_char || sp.end_char > source_length) {
      fail(ErrorCode::kInvalidArgument,
           "span [" + std::to_string(sp.start_char) + ", " +
               std::to_string(sp.end_char) + ") out of bounds for text of " +
               std::to_string(source_length) + " characters");
    }
    ranges.emplace_back(sp.start_char, sp.end_char);
  }
  std::sort(ranges.begin(), ranges.end());

  // Merge into disjoint intervals so overlapping annotations count once.
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& r : ranges) {
    if (!merged.empty() && r.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, r.second);
    } else {
      merged.push_back(r);
    }
  }

  std::vector<LabeledSentence> out;
  out.reserve(sentences.size());
  for (const Sentence& s : sentences) {
    std::size_t covered = 0;
    for (const auto& [b, e] : merged) {
      const std::size_t lo = std::max(b, s.start_char);
      const std::size_t hi = std::min(e, s.end_char);
      if (lo < hi) covered += hi - lo;
    }
    const std::size_t len = s.end_char - s.start_char;
    LabeledSentence ls;
    ls.sentence = s;
    ls.ec_fraction =
        len == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(len);
    ls.label = ls.ec_fraction > 0.5 ? Label::kEc : Label::kContent;
    out.push_back(std::move(ls));
  }
  return out;
}

}  // namespace ecd::corpus
