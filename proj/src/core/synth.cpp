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

#include "core/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "core/error.hpp"
#include "core/jsonl.hpp"
#include "core/utf8.hpp"

namespace ecd::synth {
namespace {

using jsonl::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Small explicit generator so output does not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return state_ = splitmix64(state_); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t range(std::size_t lo, std::size_t hi) {  // inclusive
    return lo + static_cast<std::size_t>(next() % (hi - lo + 1));
  }
  bool chance(double p) { return uniform() < p; }
  template <typename C>
  const auto& pick(const C& c) {
    return c[range(0, std::size(c) - 1)];
  }

 private:
  std::uint64_t state_;
};

using Words = std::vector<std::string_view>;

const std::array<Words, 8> kTopics = {{
    {"expedition", "arctic", "ship", "captain", "voyage", "ice", "crew",
     "journal", "winter", "harbor", "compass", "sailors", "storm", "maps"},
    {"detective", "murder", "evidence", "suspect", "trial", "witness", "case",
     "police", "victim", "alibi", "verdict", "investigation", "motive", "jury"},
    {"season", "coach", "playoffs", "defense", "quarterback", "league",
     "training", "stadium", "rookie", "draft", "injury", "score", "fans",
     "championship"},
    {"recipe", "café", "butter", "flour", "oven", "sauce", "garlic", "kitchen",
     "dough", "simmer", "spices", "chef", "crème", "brûlée"},
    {"startup", "software", "engineers", "cloud", "product", "users", "code",
     "launch", "servers", "algorithm", "founders", "robots", "chips", "data"},
    {"galaxy", "telescope", "planets", "gravity", "orbit", "physics", "quantum",
     "particles", "astronomers", "nebula", "comet", "light", "universe", "theory"},
    {"album", "guitar", "melody", "studio", "drummer", "lyrics", "concert",
     "tour", "chorus", "vinyl", "band", "songwriter", "rhythm", "piano"},
    {"parenting", "toddler", "bedtime", "school", "teachers", "kids",
     "homework", "siblings", "routine", "tantrums", "family", "naïve",
     "playground", "teenagers"},
}};

const Words kGlue = {"the", "a", "and", "we", "to", "of", "in", "that",
                     "was", "it", "so", "they", "with", "for", "on"};

const Words kFiller = {"you", "know", "really", "just", "like", "yeah", "i",
                       "mean", "right", "okay", "kind", "honestly", "totally",
                       "anyway", "um"};

const Words kAdWords = {"sponsor", "sponsored", "promo", "discount", "offer",
                        "download", "app", "subscribe", "website", "visit",
                        "trial", "premium", "membership", "percent", "checkout",
                        "coupon", "deal", "shipping", "signup", "brought",
                        "bonus", "savings", "exclusive", "purchase"};

const Words kBrands = {"anchor", "skillshare", "hellofresh", "squarespace",
                       "audible", "betterhelp", "grubhub", "manscaped"};

const Words kPromoWords = {"instagram", "twitter", "facebook", "patreon",
                           "merch", "newsletter", "youtube", "rate", "review",
                           "stars", "wherever"};

const Words kDescEc = {"https://anchor.fm/app", "support", "sponsored",
                       "instagram", "patreon", "promo", "discount", "follow",
                       "twitter", "merch", "subscribe", "visit", "code",
                       "https://facebook.com/show", "offer", "premium"};

constexpr double kWordDur = 0.35;
constexpr double kWordGap = 0.05;
constexpr double kSentenceGap = 0.3;

std::string capitalize(std::string_view w) {
  std::string s(w);
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

// Mixes `primary` words with glue words; at least one primary word.
std::vector<std::string> make_sentence(Rng& rng, const Words& primary,
                                       std::size_t min_len, std::size_t max_len,
                                       double primary_share) {
  const std::size_t len = rng.range(min_len, max_len);
  std::vector<std::string> words;
  words.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    words.emplace_back(rng.chance(primary_share) ? rng.pick(primary) : rng.pick(kGlue));
  }
  words[rng.range(0, len - 1)] = std::string(rng.pick(primary));
  return words;
}

std::vector<std::string> ad_sentence(Rng& rng, std::string_view brand, bool promo) {
  Words vocab = promo ? kPromoWords : kAdWords;
  vocab.push_back(brand);
  auto words = make_sentence(rng, vocab, 6, 12, 0.6);
  if (rng.chance(0.5)) words[rng.range(0, words.size() - 1)] = std::string(brand);
  return words;
}

std::string terminal(Rng& rng) {
  const double u = rng.uniform();
  return u < 0.8 ? "." : (u < 0.9 ? "?" : "!");
}

struct Planned {
  std::vector<std::string> words;
  bool ec = false;
};

void append_sentence(std::vector<corpus::Word>& out, double& clock, Planned& s,
                     Rng& rng) {
  s.words.back() += terminal(rng);
  s.words.front() = capitalize(s.words.front());
  for (const auto& w : s.words) {
    const double start = std::round(clock * 1000.0) / 1000.0;
    const double end = std::round((clock + kWordDur) * 1000.0) / 1000.0;
    out.push_back(corpus::Word{w, start, end});
    clock += kWordDur + kWordGap;
  }
  clock += kSentenceGap;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += words[i];
  }
  return out;
}

void build_description(Rng& rng, const SynthConfig& cfg, const Words& topic,
                       SynthEpisode& ep) {
  std::string text;
  const std::size_t n_content = rng.range(2, 6);
  for (std::size_t i = 0; i < n_content; ++i) {
    auto words = rng.chance(cfg.content_filler_rate)
                     ? make_sentence(rng, kFiller, 4, 8, 0.7)
                     : make_sentence(rng, topic, 6, 14, 0.6);
    words.front() = capitalize(words.front());
    if (i > 0) text += " ";
    text += join(words) + terminal(rng);
  }
  if (!rng.chance(cfg.description_ec_rate)) {
    ep.annotations.push_back({ep.episode.id, corpus::Source::kDescription, {}});
    ep.episode.description = text;
    return;
  }
  static constexpr std::array<std::string_view, 3> kBreaks = {" ", " --- ", "   "};
  text += rng.pick(kBreaks);
  const std::size_t ec_start = utf8::length(text);
  const std::size_t n_ec = rng.range(1, 4);
  const std::size_t filler_at =
      n_ec >= 3 && rng.chance(0.1) ? rng.range(1, n_ec - 2) : n_ec;
  for (std::size_t i = 0; i < n_ec; ++i) {
    auto words = i == filler_at ? make_sentence(rng, kFiller, 4, 8, 0.7)
                                : make_sentence(rng, kDescEc, 3, 9, 0.7);
    words.front() = capitalize(words.front());
    std::string sentence = join(words);
    const bool last = i + 1 == n_ec;
    if (last) {
      if (rng.chance(0.5)) sentence += terminal(rng);
      text += sentence;
    } else if (rng.chance(0.4)) {
      text += sentence + "   ";
    } else {
      text += sentence + terminal(rng) + " ";
    }
  }
  const std::size_t ec_end = utf8::length(text);
  ep.episode.description = text;
  ep.annotations.push_back({ep.episode.id,
                            corpus::Source::kDescription,
                            {{corpus::Source::kDescription, ec_start, ec_end}}});
}

}  // namespace

std::vector<double> render_retention(std::size_t duration_s,
                                     const std::vector<PlantedDip>& dips,
                                     double noise, std::uint64_t seed,
                                     bool flat) {
  Rng rng(splitmix64(seed ^ 0x5DEECE66DULL));
  std::vector<double> v(std::max<std::size_t>(duration_s, 1));
  const double tau = std::max(60.0, static_cast<double>(duration_s) / 1.5);
  for (std::size_t t = 0; t < v.size(); ++t) {
    const double ts = static_cast<double>(t);
    double x = flat ? 0.8 : 0.55 + 0.4 * std::exp(-ts / tau);
    for (const PlantedDip& d : dips) {
      double shape = 0.0;
      if (ts > d.start_s && ts < d.start_s + d.ramp_s) {
        shape = (ts - d.start_s) / d.ramp_s;
      } else if (ts >= d.start_s + d.ramp_s && ts <= d.end_s - d.ramp_s) {
        const double half = 0.5 * (d.end_s - d.start_s) - d.ramp_s;
        const double mid = 0.5 * (d.start_s + d.end_s);
        shape = half > 0.0 ? 1.0 + 0.4 * (1.0 - std::abs(ts - mid) / half) : 1.4;
      } else if (ts > d.end_s - d.ramp_s && ts < d.end_s) {
        shape = (d.end_s - ts) / d.ramp_s;
      }
      x -= d.depth * shape;
    }
    x += noise * rng.uniform(-1.0, 1.0);
    v[t] = std::clamp(x, 0.0, 1.0);
  }
  return v;
}

PlantedCurve planted_dip_curve(std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  PlantedCurve pc;
  const std::size_t duration = rng.range(900, 1800);
  PlantedDip d;
  d.ramp_s = static_cast<double>(rng.range(4, 10));
  d.start_s = static_cast<double>(rng.range(200, duration - 300));
  d.end_s = d.start_s + 2.0 * d.ramp_s + static_cast<double>(rng.range(16, 60));
  d.depth = rng.uniform(0.04, 0.15);
  d.has_ec = true;
  pc.dip = d;
  pc.curve.episode_id = "curve" + std::to_string(seed);
  pc.curve.listener_count = static_cast<long long>(rng.range(200, 5000));
  pc.curve.values = render_retention(duration, {d}, 0.001, seed, true);
  return pc;
}

SynthEpisode generate_episode(const SynthConfig& cfg, std::size_t index) {
  Rng rng(splitmix64(cfg.seed * 0x100000001B3ULL + index));
  SynthEpisode ep;
  char id[32];
  std::snprintf(id, sizeof(id), "ep%05zu", index);
  ep.episode.id = id;
  const Words& topic = rng.pick(kTopics);

  build_description(rng, cfg, topic, ep);

  // Transcript plan: content sentences with ad blocks spliced in.
  const std::size_t n_content = rng.range(cfg.min_sentences, cfg.max_sentences);
  std::vector<Planned> plan;
  plan.reserve(n_content + 24);
  for (std::size_t i = 0; i < n_content; ++i) {
    Planned s;
    s.words = rng.chance(cfg.content_filler_rate) ? make_sentence(rng, kFiller, 4, 8, 0.7)
                                                  : make_sentence(rng, topic, 6, 12, 0.6);
    plan.push_back(std::move(s));
  }

  std::vector<std::size_t> block_at;  // insertion points in content indices
  if (!rng.chance(cfg.ad_free_rate)) {
    const std::size_t lo = 25;
    const std::size_t hi = n_content - 25;
    if (rng.chance(cfg.second_block_rate)) {
      const std::size_t a = rng.range(lo, (lo + hi) / 2 - 40);
      const std::size_t b = rng.range(a + 80, hi);
      block_at = {a, b};
    } else {
      block_at = {rng.range(lo, hi)};
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // plan [first, last]
  std::size_t shift = 0;
  for (std::size_t at : block_at) {
    const std::size_t pos = at + shift;
    const std::size_t len = rng.range(6, 10);
    const std::string_view brand = rng.pick(kBrands);
    const bool promo = rng.chance(0.3);
    const std::size_t filler_at =
        rng.chance(cfg.block_filler_rate) ? rng.range(2, len - 3) : len;
    std::vector<Planned> block;
    for (std::size_t k = 0; k < len; ++k) {
      Planned s;
      s.ec = true;
      s.words = k == filler_at ? make_sentence(rng, kFiller, 4, 8, 0.7)
                               : ad_sentence(rng, brand, promo);
      block.push_back(std::move(s));
    }
    plan.insert(plan.begin() + static_cast<std::ptrdiff_t>(pos),
                std::make_move_iterator(block.begin()),
                std::make_move_iterator(block.end()));
    blocks.emplace_back(pos, pos + len - 1);
    shift += len;
  }

  // Time-align words; remember sentence word ranges.
  std::vector<std::pair<std::size_t, std::size_t>> word_range;  // [first, end)
  double clock = rng.uniform(0.5, 2.0);
  for (Planned& s : plan) {
    const std::size_t first = ep.episode.words.size();
    append_sentence(ep.episode.words, clock, s, rng);
    word_range.emplace_back(first, ep.episode.words.size());
  }

  // Character offsets of each word in the joined transcript.
  std::vector<std::size_t> word_offset(ep.episode.words.size());
  std::size_t off = 0;
  for (std::size_t w = 0; w < ep.episode.words.size(); ++w) {
    word_offset[w] = off;
    off += utf8::length(ep.episode.words[w].token) + 1;
  }

  corpus::Annotation tr{ep.episode.id, corpus::Source::kTranscript, {}};
  for (const auto& [first, last] : blocks) {
    const std::size_t w0 = word_range[first].first;
    const std::size_t w1 = word_range[last].second - 1;
    tr.spans.push_back({corpus::Source::kTranscript, word_offset[w0],
                        word_offset[w1] + utf8::length(ep.episode.words[w1].token)});
    PlantedDip d;
    d.start_s = std::floor(ep.episode.words[w0].start_s);
    d.end_s = std::ceil(ep.episode.words[w1].end_s);
    d.ramp_s = static_cast<double>(rng.range(3, 6));
    d.depth = rng.uniform(0.05, 0.15);
    d.has_ec = true;
    ep.dips.push_back(d);
  }
  ep.annotations.push_back(std::move(tr));

  if (rng.chance(cfg.intro_dip_rate)) {
    PlantedDip d;
    d.start_s = static_cast<double>(rng.range(8, 20));
    d.ramp_s = 4.0;
    d.end_s = d.start_s + static_cast<double>(rng.range(20, 40));
    d.depth = rng.uniform(0.04, 0.08);
    ep.dips.insert(ep.dips.begin(), d);
  }

  const auto duration = static_cast<std::size_t>(std::ceil(ep.episode.duration_s())) + 1;
  ep.curve.episode_id = ep.episode.id;
  ep.curve.listener_count = rng.chance(cfg.low_listener_rate)
                                ? static_cast<long long>(rng.range(20, 90))
                                : static_cast<long long>(rng.range(150, 5000));
  ep.curve.values = render_retention(duration, ep.dips, 0.001, rng.next());
  return ep;
}

void write_corpus(const SynthConfig& config, const std::filesystem::path& dir,
                  const json& header) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir.string());
  jsonl::Writer episodes(dir / "episodes.jsonl");
  jsonl::Writer annotations(dir / "annotations.jsonl");
  jsonl::Writer retention(dir / "retention.jsonl");
  if (!header.is_null()) {
    for (jsonl::Writer* w : {&episodes, &annotations, &retention}) {
      w->write({{"header", header}});
    }
  }
  for (std::size_t i = 0; i < config.episodes; ++i) {
    const SynthEpisode ep = generate_episode(config, i);
    json words = json::array();
    for (const auto& w : ep.episode.words) {
      words.push_back({{"t", w.token}, {"s", w.start_s}, {"e", w.end_s}});
    }
    episodes.write({{"id", ep.episode.id},
                    {"description", ep.episode.description},
                    {"words", std::move(words)},
                    {"retention_curve_id", ep.curve.episode_id}});
    for (const auto& a : ep.annotations) {
      json spans = json::array();
      for (const auto& s : a.spans) {
        spans.push_back({{"start", s.start_char}, {"end", s.end_char}});
      }
      annotations.write({{"episode_id", a.episode_id},
                         {"source", corpus::to_string(a.source)},
                         {"spans", std::move(spans)}});
    }
    retention.write({{"episode_id", ep.curve.episode_id},
                     {"listener_count", *ep.curve.listener_count},
                     {"values", ep.curve.values}});
  }
  episodes.close();
  annotations.close();
  retention.close();
}

}  // namespace ecd::synth
