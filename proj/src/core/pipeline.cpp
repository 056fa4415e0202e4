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

#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <thread>
#include <unordered_map>
#include <utility>

#include "core/error.hpp"
#include "core/jsonl.hpp"
#include "core/rouge.hpp"
#include "core/silverset.hpp"
#include "core/utf8.hpp"

namespace ecd::pipeline {
namespace {

using json = nlohmann::json;

constexpr int kBundleFormatVersion = 1;

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::kParse, "config " + where + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail(ErrorCode::kParse, "unknown config key '" + where + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

const json& section(const json& j, const char* key) {
  static const json kEmpty = json::object();
  return j.contains(key) ? j.at(key) : kEmpty;
}

const std::string& require(const std::string& path, const char* what) {
  if (path.empty()) {
    fail(ErrorCode::kInvalidArgument, std::string("missing required path: ") + what);
  }
  return path;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

using Inputs = std::vector<std::pair<std::string, std::string>>;  // role, path

json make_header(std::string_view command, const PipelineConfig& cfg,
                 const Inputs& inputs, json extra = json::object()) {
  json hashes = json::object();
  for (const auto& [role, path] : inputs) {
    hashes[role] = jsonl::payload_hash(path);
  }
  json h = {{"tool", kToolName},
            {"version", kToolVersion},
            {"command", command},
            {"config_hash", config_hash(cfg)},
            {"inputs", std::move(hashes)},
            {"created_at", utc_timestamp()}};
  for (auto& [k, v] : extra.items()) h[k] = v;
  return h;
}

// Runs fn(i) for i in [0, n) over contiguous chunks; results are written by
// index so output order does not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(t);
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<corpus::Sentence> sentences_for(const corpus::Episode& ep,
                                            corpus::Source source) {
  return source == corpus::Source::kDescription
             ? corpus::segment_description(ep.description)
             : corpus::segment_transcript(ep.words);
}

std::size_t source_length(const corpus::Episode& ep, corpus::Source source) {
  return source == corpus::Source::kDescription
             ? utf8::length(ep.description)
             : utf8::length(corpus::transcript_text(ep.words));
}

json sentence_json(const corpus::Sentence& s) {
  json j = {{"sentence_index", s.index},
            {"text", s.text},
            {"start_char", s.start_char},
            {"end_char", s.end_char}};
  if (s.start_s) j["start_s"] = *s.start_s;
  if (s.end_s) j["end_s"] = *s.end_s;
  return j;
}

corpus::Sentence sentence_from_json(const json& j) {
  corpus::Sentence s;
  s.index = j.at("sentence_index").get<std::size_t>();
  s.text = j.at("text").get<std::string>();
  s.start_char = j.value("start_char", std::size_t{0});
  s.end_char = j.value("end_char", std::size_t{0});
  if (j.contains("start_s")) s.start_s = j.at("start_s").get<double>();
  if (j.contains("end_s")) s.end_s = j.at("end_s").get<double>();
  return s;
}

json dip_json(const dipdetect::Dip& d) {
  return {{"peak_s", d.peak_s},           {"start_s", d.start_s},
          {"end_s", d.end_s},             {"start_slope", d.start_slope},
          {"end_slope", d.end_slope},     {"recovered", d.recovered()}};
}

dipdetect::Dip dip_from_json(const json& j) {
  dipdetect::Dip d;
  d.peak_s = j.at("peak_s").get<double>();
  d.start_s = j.at("start_s").get<double>();
  d.end_s = j.at("end_s").get<double>();
  d.start_slope = j.at("start_slope").get<double>();
  d.end_slope = j.at("end_slope").get<double>();
  return d;
}

void put_key(json& j, const std::string& episode_id,
             const std::optional<std::size_t>& segment_index,
             std::size_t sentence_index) {
  j["episode_id"] = episode_id;
  if (segment_index) j["segment_index"] = *segment_index;
  j["sentence_index"] = sentence_index;
}

using DocKey = std::pair<std::string, long long>;

DocKey doc_key(const std::string& episode_id, const std::optional<std::size_t>& seg) {
  return {episode_id, seg ? static_cast<long long>(*seg) : -1LL};
}

void write_document(const std::string& path, const json& doc) {
  jsonl::write_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

json cmd_synth(const PipelineConfig& cfg) {
  const std::string& dir = require(cfg.paths.output, "output");
  synth::write_corpus(cfg.synth, dir, make_header("synth", cfg, {}));
  return {{"episodes", cfg.synth.episodes}, {"directory", dir}};
}

json cmd_segment(const PipelineConfig& cfg) {
  const std::string& ep_path = require(cfg.paths.episodes, "episodes");
  const auto episodes = corpus::load_episodes(ep_path);
  jsonl::Writer out(require(cfg.paths.output, "output"));
  out.write({{"header", make_header("segment", cfg, {{"episodes", ep_path}})}});
  std::size_t n = 0;
  for (const auto& ep : episodes) {
    for (const auto& s : sentences_for(ep, cfg.source)) {
      json j = sentence_json(s);
      j["episode_id"] = ep.id;
      j["source"] = corpus::to_string(cfg.source);
      out.write(j);
      ++n;
    }
  }
  out.close();
  return {{"episodes", episodes.size()}, {"sentences", n}};
}

json cmd_label(const PipelineConfig& cfg) {
  const std::string& ep_path = require(cfg.paths.episodes, "episodes");
  const std::string& ann_path = require(cfg.paths.annotations, "annotations");
  const auto episodes = corpus::load_episodes(ep_path);
  const auto annotations = corpus::load_annotations(ann_path);

  std::map<std::string, std::vector<corpus::Span>> spans;
  for (const auto& a : annotations) {
    if (a.source != cfg.source) continue;
    auto& v = spans[a.episode_id];
    v.insert(v.end(), a.spans.begin(), a.spans.end());
  }

  Inputs inputs = {{"episodes", ep_path}, {"annotations", ann_path}};
  std::vector<IndexedSegment> segments;
  if (!cfg.paths.segments.empty()) {
    if (cfg.source != corpus::Source::kTranscript) {
      fail(ErrorCode::kInvalidArgument, "segments apply to transcripts only");
    }
    segments = load_segments(cfg.paths.segments);
    inputs.emplace_back("segments", cfg.paths.segments);
  }

  jsonl::Writer out(require(cfg.paths.output, "output"));
  out.write({{"header", make_header("label", cfg, inputs)}});

  auto record = [&](const std::string& id, const corpus::LabeledSentence& ls) {
    json j = sentence_json(ls.sentence);
    j["episode_id"] = id;
    j["source"] = corpus::to_string(cfg.source);
    j["ec_fraction"] = ls.ec_fraction;
    j["label"] = corpus::to_string(ls.label);
    return j;
  };

  std::size_t n = 0;
  std::size_t n_ec = 0;
  std::size_t labeled_episodes = 0;
  std::map<std::string, std::vector<corpus::LabeledSentence>> by_episode;
  for (const auto& ep : episodes) {
    auto it = spans.find(ep.id);
    if (it == spans.end()) continue;
    ++labeled_episodes;
    const auto sentences = sentences_for(ep, cfg.source);
    auto labeled = corpus::label_sentences(sentences, it->second,
                                           source_length(ep, cfg.source));
    if (segments.empty()) {
      for (const auto& ls : labeled) {
        out.write(record(ep.id, ls));
        ++n;
        n_ec += ls.label == corpus::Label::kEc ? 1 : 0;
      }
    } else {
      by_episode.emplace(ep.id, std::move(labeled));
    }
  }
  for (const auto& seg : segments) {
    auto it = by_episode.find(seg.segment.episode_id);
    if (it == by_episode.end()) continue;
    for (const auto& m : silverset::mark_segment(seg.segment)) {
      if (m.sentence.index >= it->second.size()) {
        fail(ErrorCode::kParse, "segment sentence index out of range for '" +
                                    seg.segment.episode_id + "'");
      }
      json j = record(seg.segment.episode_id, it->second[m.sentence.index]);
      j["segment_index"] = seg.segment_index;
      j["marker"] = silverset::to_string(m.marker);
      out.write(j);
      ++n;
      n_ec += it->second[m.sentence.index].label == corpus::Label::kEc ? 1 : 0;
    }
  }
  out.close();
  return {{"episodes", labeled_episodes}, {"sentences", n}, {"ec_sentences", n_ec}};
}

json cmd_dips(const PipelineConfig& cfg) {
  const std::string& ep_path = require(cfg.paths.episodes, "episodes");
  const std::string& ret_path = require(cfg.paths.retention, "retention");
  const auto curves = dipdetect::load_retention(ret_path);
  const auto episodes = corpus::load_episodes(ep_path);

  std::unordered_map<std::string, std::size_t> curve_of;
  for (std::size_t i = 0; i < curves.size(); ++i) curve_of.emplace(curves[i].episode_id, i);

  std::vector<std::vector<dipdetect::DipSegment>> found(episodes.size());
  std::vector<char> skipped(episodes.size(), 0);
  parallel_for(episodes.size(), cfg.threads, [&](std::size_t i) {
    const auto& ep = episodes[i];
    auto it = curve_of.find(ep.retention_curve_id.value_or(ep.id));
    if (it == curve_of.end()) return;
    const auto& curve = curves[it->second];
    if (curve.listener_count && *curve.listener_count < cfg.dips.min_listeners) {
      skipped[i] = 1;
      return;
    }
    const auto sentences = corpus::segment_transcript(ep.words);
    found[i] = dipdetect::detect_segments(curve, ep, sentences, cfg.dips);
  });

  jsonl::Writer out(require(cfg.paths.output, "output"));
  out.write({{"header", make_header("dips", cfg,
                                    {{"episodes", ep_path}, {"retention", ret_path}})}});
  std::size_t n = 0;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    for (std::size_t k = 0; k < found[i].size(); ++k) {
      const auto& seg = found[i][k];
      json sentences = json::array();
      for (const auto& m : silverset::mark_segment(seg)) {
        json s = sentence_json(m.sentence);
        s["marker"] = silverset::to_string(m.marker);
        sentences.push_back(std::move(s));
      }
      out.write({{"episode_id", seg.episode_id},
                 {"segment_index", k},
                 {"window_start_s", seg.window_start_s},
                 {"window_end_s", seg.window_end_s},
                 {"dip", dip_json(seg.dip)},
                 {"sentences", std::move(sentences)}});
      ++n;
    }
  }
  out.close();
  return {{"episodes", episodes.size()},
          {"segments", n},
          {"skipped_low_listeners",
           static_cast<std::size_t>(std::count(skipped.begin(), skipped.end(), 1))}};
}

json cmd_train(const PipelineConfig& cfg) {
  const std::string& in_path = require(cfg.paths.input, "input");
  const auto records = load_text_records(in_path);
  bool markers = false;
  for (const auto& r : records) {
    if (!r.label) {
      fail(ErrorCode::kParse, "training record without a label (" + r.episode_id +
                                  ":" + std::to_string(r.sentence_index) + ")");
    }
    markers = markers || r.marker.has_value();
  }
  if (records.empty()) fail(ErrorCode::kDegenerate, "degenerate training set");
  const auto inputs = build_inputs(records, cfg.with_context, markers);

  ClassifierBundle bundle;
  bundle.with_context = cfg.with_context;
  bundle.markers = markers;
  bundle.tfidf = features::fit_tfidf(inputs, cfg.ngram_max);
  std::vector<linear::Example> examples(records.size());
  parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
    examples[i] = {features::transform(bundle.tfidf, inputs[i]), *records[i].label};
  });
  bundle.model = linear::train(cfg.kind, examples, cfg.train);

  std::vector<corpus::Label> preds;
  std::vector<corpus::Label> gold;
  for (const auto& ex : examples) {
    preds.push_back(linear::predict_proba(bundle.model, ex.x) >= 0.5 ? corpus::Label::kEc
                                                                     : corpus::Label::kContent);
    gold.push_back(ex.y);
  }
  const auto m = linear::evaluate(preds, gold);

  json doc = to_json(bundle);
  doc["header"] = make_header("train", cfg, {{"input", in_path}});
  jsonl::write_file(require(cfg.paths.output, "output"), doc.dump() + "\n");
  return {{"examples", examples.size()},
          {"vocabulary", bundle.tfidf.size()},
          {"markers", markers},
          {"train_f1", m.f1},
          {"train_accuracy", m.accuracy}};
}

json cmd_predict(const PipelineConfig& cfg) {
  const std::string& model_path = require(cfg.paths.model, "model");
  const std::string& in_path = require(cfg.paths.input, "input");
  const ClassifierBundle bundle = load_bundle(model_path);
  const auto records = load_text_records(in_path);
  const auto inputs = build_inputs(records, bundle.with_context, bundle.markers);

  std::vector<double> probs(records.size());
  parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
    probs[i] = linear::predict_proba(bundle.model, features::transform(bundle.tfidf, inputs[i]));
  });

  const bool calibrated = bundle.model.kind == linear::ModelKind::kLogistic;
  jsonl::Writer out(require(cfg.paths.output, "output"));
  out.write({{"header", make_header("predict", cfg,
                                    {{"model", model_path}, {"input", in_path}},
                                    {{"model_kind", linear::to_string(bundle.model.kind)},
                                     {"calibrated", calibrated}})}});
  for (std::size_t i = 0; i < records.size(); ++i) {
    json j;
    put_key(j, records[i].episode_id, records[i].segment_index, records[i].sentence_index);
    j["prob"] = probs[i];
    out.write(j);
  }
  out.close();
  return {{"sentences", records.size()}, {"calibrated", calibrated}};
}

struct ProbRecord {
  std::string episode_id;
  std::optional<std::size_t> segment_index;
  std::size_t sentence_index = 0;
  double prob = 0.0;
};

json cmd_decode(const PipelineConfig& cfg) {
  const std::string& in_path = require(cfg.paths.probs, "probs");
  const std::string& mode = cfg.decode_mode;

  std::map<DocKey, std::size_t> group_of;
  std::vector<std::vector<ProbRecord>> groups;
  jsonl::for_each_record(in_path, [&](const json& j, std::size_t) {
    ProbRecord r;
    r.episode_id = j.at("episode_id").get<std::string>();
    if (j.contains("segment_index")) r.segment_index = j.at("segment_index").get<std::size_t>();
    r.sentence_index = j.at("sentence_index").get<std::size_t>();
    r.prob = j.at("prob").get<double>();
    if (!(r.prob >= 0.0 && r.prob <= 1.0)) {
      fail(ErrorCode::kParse, "prob outside [0, 1]");
    }
    const auto key = doc_key(r.episode_id, r.segment_index);
    auto [it, inserted] = group_of.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(std::move(r));
  });

  jsonl::Writer out(require(cfg.paths.output, "output"));
  out.write({{"header", make_header("decode", cfg, {{"probs", in_path}},
                                    {{"mode", mode}})}});
  std::size_t accepted = 0;
  std::size_t n = 0;
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(), [](const ProbRecord& a, const ProbRecord& b) {
      return a.sentence_index < b.sentence_index;
    });
    docdecode::ProbSequence seq;
    seq.episode_id = g.front().episode_id;
    for (const auto& r : g) seq.probs.push_back(r.prob);
    std::vector<corpus::Label> labels;
    if (mode == "smoothing") {
      labels = docdecode::decode_transcript(seq, cfg.smoothing);
    } else if (mode == "changepoint") {
      if (seq.probs.size() >= 2 &&
          docdecode::detect_change_point(seq, cfg.min_llr).accepted) {
        ++accepted;
      }
      labels = docdecode::decode_description(seq, cfg.min_llr);
    } else {
      labels = docdecode::threshold_labels(seq.probs, cfg.smoothing.threshold);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      json j;
      put_key(j, g[i].episode_id, g[i].segment_index, g[i].sentence_index);
      j["label"] = corpus::to_string(labels[i]);
      out.write(j);
      ++n;
    }
  }
  out.close();
  json summary = {{"documents", groups.size()}, {"sentences", n}, {"mode", mode}};
  if (mode == "changepoint") summary["change_points_accepted"] = accepted;
  return summary;
}

json cmd_silver(const PipelineConfig& cfg) {
  const std::string& seg_path = require(cfg.paths.segments, "segments");
  const std::string& ep_path = require(cfg.paths.episodes, "episodes");
  const bool use_model = !cfg.paths.model.empty();
  if (!use_model && cfg.paths.probs.empty()) {
    fail(ErrorCode::kInvalidArgument, "silver needs either a model or a probs file");
  }
  const auto segments = load_segments(seg_path);
  const auto episodes = corpus::load_episodes(ep_path);
  Inputs inputs = {{"segments", seg_path}, {"episodes", ep_path}};

  std::optional<ClassifierBundle> bundle;
  std::map<std::tuple<std::string, std::size_t, std::size_t>, double> probs;
  if (use_model) {
    bundle = load_bundle(cfg.paths.model);
    inputs.emplace_back("model", cfg.paths.model);
  } else {
    jsonl::for_each_record(cfg.paths.probs, [&](const json& j, std::size_t) {
      probs[{j.at("episode_id").get<std::string>(), j.at("segment_index").get<std::size_t>(),
             j.at("sentence_index").get<std::size_t>()}] = j.at("prob").get<double>();
    });
    inputs.emplace_back("probs", cfg.paths.probs);
  }

  std::unordered_map<std::string, const corpus::Episode*> episode_of;
  for (const auto& ep : episodes) episode_of.emplace(ep.id, &ep);

  // Segments grouped per episode, in order of first appearance.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const IndexedSegment*>> per_episode;
  for (const auto& s : segments) {
    auto& v = per_episode[s.segment.episode_id];
    if (v.empty()) order.push_back(s.segment.episode_id);
    v.push_back(&s);
  }

  jsonl::Writer out(require(cfg.paths.output, "output"));
  out.write({{"header", make_header("silver", cfg, inputs)}});
  std::size_t n_pos = 0;
  std::size_t n_ec = 0;
  std::size_t n_neg = 0;
  for (const auto& id : order) {
    auto ep_it = episode_of.find(id);
    if (ep_it == episode_of.end()) {
      fail(ErrorCode::kParse, "segment references unknown episode '" + id + "'");
    }
    std::vector<dipdetect::Dip> dips;
    std::size_t region_sentences = 0;
    for (const IndexedSegment* s : per_episode[id]) {
      dips.push_back(s->segment.dip);
      region_sentences += s->segment.sentences.size();
      std::vector<silverset::SilverRecord> recs;
      if (bundle) {
        recs = silverset::build_silver(bundle->model, bundle->tfidf,
                                       std::span(&s->segment, 1), bundle->with_context);
      } else {
        for (const auto& sent : s->segment.sentences) {
          auto it = probs.find({id, s->segment_index, sent.index});
          if (it == probs.end()) {
            fail(ErrorCode::kParse, "no probability for " + id + " segment " +
                                        std::to_string(s->segment_index) + " sentence " +
                                        std::to_string(sent.index));
          }
          silverset::SilverRecord r;
          r.episode_id = id;
          r.dip_peak_s = s->segment.dip.peak_s;
          r.prob = it->second;
          r.labeled.sentence = sent;
          r.labeled.label = r.prob >= 0.5 ? corpus::Label::kEc : corpus::Label::kContent;
          r.labeled.ec_fraction = r.labeled.label == corpus::Label::kEc ? 1.0 : 0.0;
          recs.push_back(std::move(r));
        }
      }
      for (const auto& r : recs) {
        json j;
        put_key(j, id, s->segment_index, r.labeled.sentence.index);
        j["text"] = r.labeled.sentence.text;
        j["label"] = corpus::to_string(r.labeled.label);
        j["prob"] = r.prob;
        j["provenance"] = {{"dip_peak_s", s->segment.dip.peak_s}};
        out.write(j);
        ++n_pos;
        n_ec += r.labeled.label == corpus::Label::kEc ? 1 : 0;
      }
    }
    const auto sentences = corpus::segment_transcript(ep_it->second->words);
    const auto cap = static_cast<std::size_t>(
        std::ceil(cfg.negative_cap_ratio * static_cast<double>(region_sentences)));
    for (const auto& ls : silverset::sample_negatives(sentences, dips, cfg.min_gap_s, cap)) {
      json j;
      put_key(j, id, std::nullopt, ls.sentence.index);
      j["text"] = ls.sentence.text;
      j["label"] = corpus::to_string(ls.label);
      j["provenance"] = {{"dip_peak_s", nullptr}};
      out.write(j);
      ++n_neg;
    }
  }
  out.close();
  return {{"segment_sentences", n_pos}, {"silver_ec", n_ec}, {"negatives", n_neg},
          {"total", n_pos + n_neg}};
}

json cmd_eval(const PipelineConfig& cfg) {
  const std::string& pred_path = require(cfg.paths.pred, "pred");
  const std::string& gold_path = require(cfg.paths.gold, "gold");
  const auto gold_records = load_text_records(gold_path);
  const auto pred_records = load_text_records(pred_path);

  std::map<std::tuple<std::string, long long, std::size_t>, corpus::Label> gold_of;
  for (const auto& g : gold_records) {
    if (!g.label) fail(ErrorCode::kParse, "gold record without a label");
    const auto key = doc_key(g.episode_id, g.segment_index);
    gold_of[{key.first, key.second, g.sentence_index}] = *g.label;
  }
  std::vector<corpus::Label> preds;
  std::vector<corpus::Label> gold;
  std::map<DocKey, std::size_t> doc_of;
  std::vector<bool> doc_ok;
  for (const auto& p : pred_records) {
    if (!p.label) fail(ErrorCode::kParse, "prediction record without a label");
    const auto key = doc_key(p.episode_id, p.segment_index);
    auto it = gold_of.find({key.first, key.second, p.sentence_index});
    if (it == gold_of.end()) {
      fail(ErrorCode::kParse, "no gold label for " + p.episode_id + " sentence " +
                                  std::to_string(p.sentence_index));
    }
    preds.push_back(*p.label);
    gold.push_back(it->second);
    auto [d, inserted] = doc_of.emplace(key, doc_ok.size());
    if (inserted) doc_ok.push_back(true);
    doc_ok[d->second] = doc_ok[d->second] && *p.label == it->second;
  }
  const auto m = linear::evaluate(preds, gold);
  const auto matched = static_cast<double>(std::count(doc_ok.begin(), doc_ok.end(), true));
  json result = {{"sentences", preds.size()},
                 {"documents", doc_ok.size()},
                 {"precision", m.precision},
                 {"recall", m.recall},
                 {"f1", m.f1},
                 {"accuracy", m.accuracy},
                 {"doc_accuracy", matched / static_cast<double>(doc_ok.size())},
                 {"confusion",
                  {{"tp", m.true_pos}, {"fp", m.false_pos}, {"fn", m.false_neg},
                   {"tn", m.true_neg}}}};
  json doc = result;
  doc["header"] = make_header("eval", cfg, {{"pred", pred_path}, {"gold", gold_path}});
  write_document(require(cfg.paths.output, "output"), doc);
  return result;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

json cmd_rouge(const PipelineConfig& cfg) {
  const std::string& cand_path = require(cfg.paths.candidates, "candidates");
  const std::string& ref_path = require(cfg.paths.references, "references");
  const auto cands = read_lines(cand_path);
  const auto refs = read_lines(ref_path);
  if (cands.size() != refs.size()) {
    fail(ErrorCode::kParse, "candidate and reference files have different line counts (" +
                                std::to_string(cands.size()) + " vs " +
                                std::to_string(refs.size()) + ")");
  }
  Inputs inputs = {{"candidates", cand_path}, {"references", ref_path}};
  json per_line = json::array();
  double r = 0.0;
  double p = 0.0;
  double f = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto s = rouge::rouge_l(cands[i], refs[i], cfg.beta);
    per_line.push_back({{"recall", s.recall}, {"precision", s.precision}, {"f", s.f}});
    r += s.recall;
    p += s.precision;
    f += s.f;
  }
  const double n = std::max<double>(1.0, static_cast<double>(cands.size()));
  json result = {{"lines", cands.size()},
                 {"beta", cfg.beta},
                 {"mean", {{"recall", r / n}, {"precision", p / n}, {"f", f / n}}},
                 {"per_line", std::move(per_line)}};
  if (!cfg.paths.ec_labels.empty()) {
    std::vector<std::vector<corpus::Label>> summaries;
    jsonl::for_each_record(cfg.paths.ec_labels, [&](const json& j, std::size_t) {
      std::vector<corpus::Label> labels;
      for (const auto& l : j.at("labels")) labels.push_back(corpus::parse_label(l.get<std::string>()));
      summaries.push_back(std::move(labels));
    });
    result["ec_fraction_percent"] = rouge::ec_fraction(summaries);
    inputs.emplace_back("ec_labels", cfg.paths.ec_labels);
  }
  json doc = result;
  doc["header"] = make_header("rouge", cfg, inputs);
  write_document(require(cfg.paths.output, "output"), doc);
  json summary = result;
  summary.erase("per_line");
  return summary;
}

}  // namespace

// ---------------------------------------------------------------------------

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    check_keys(j, {"paths", "source", "seed", "threads", "dips", "features", "train",
                   "smoothing", "changepoint", "decode", "silver", "rouge", "synth"},
               "");
    const json& p = section(j, "paths");
    check_keys(p, {"episodes", "retention", "annotations", "segments", "model", "input",
                   "probs", "pred", "gold", "candidates", "references", "ec_labels",
                   "output"},
               "paths.");
    read(p, "episodes", c.paths.episodes);
    read(p, "retention", c.paths.retention);
    read(p, "annotations", c.paths.annotations);
    read(p, "segments", c.paths.segments);
    read(p, "model", c.paths.model);
    read(p, "input", c.paths.input);
    read(p, "probs", c.paths.probs);
    read(p, "pred", c.paths.pred);
    read(p, "gold", c.paths.gold);
    read(p, "candidates", c.paths.candidates);
    read(p, "references", c.paths.references);
    read(p, "ec_labels", c.paths.ec_labels);
    read(p, "output", c.paths.output);

    if (j.contains("source")) c.source = corpus::parse_source(j.at("source").get<std::string>());
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);

    const json& d = section(j, "dips");
    check_keys(d, {"min_prominence", "min_distance_s", "window_s", "min_listeners", "pre_s",
                   "post_s"},
               "dips.");
    read(d, "min_prominence", c.dips.min_prominence);
    read(d, "min_distance_s", c.dips.min_distance_s);
    read(d, "window_s", c.dips.window_s);
    read(d, "min_listeners", c.dips.min_listeners);
    read(d, "pre_s", c.dips.pre_s);
    read(d, "post_s", c.dips.post_s);

    const json& f = section(j, "features");
    check_keys(f, {"ngram_max", "with_context"}, "features.");
    read(f, "ngram_max", c.ngram_max);
    read(f, "with_context", c.with_context);

    const json& t = section(j, "train");
    check_keys(t, {"kind", "epochs", "learning_rate", "l2_lambda", "shuffle",
                   "balance_classes"},
               "train.");
    if (t.contains("kind")) c.kind = linear::parse_kind(t.at("kind").get<std::string>());
    read(t, "epochs", c.train.epochs);
    read(t, "learning_rate", c.train.learning_rate);
    read(t, "l2_lambda", c.train.l2_lambda);
    read(t, "shuffle", c.train.shuffle);
    read(t, "balance_classes", c.train.balance_classes);

    const json& s = section(j, "smoothing");
    check_keys(s, {"bandwidth", "threshold"}, "smoothing.");
    read(s, "bandwidth", c.smoothing.bandwidth);
    read(s, "threshold", c.smoothing.threshold);

    const json& cp = section(j, "changepoint");
    check_keys(cp, {"min_llr"}, "changepoint.");
    read(cp, "min_llr", c.min_llr);

    const json& dec = section(j, "decode");
    check_keys(dec, {"mode"}, "decode.");
    read(dec, "mode", c.decode_mode);

    const json& sv = section(j, "silver");
    check_keys(sv, {"min_gap_s", "negative_cap_ratio"}, "silver.");
    read(sv, "min_gap_s", c.min_gap_s);
    read(sv, "negative_cap_ratio", c.negative_cap_ratio);

    const json& r = section(j, "rouge");
    check_keys(r, {"beta"}, "rouge.");
    read(r, "beta", c.beta);

    const json& sy = section(j, "synth");
    check_keys(sy, {"episodes", "min_sentences", "max_sentences", "ad_free_rate",
                    "second_block_rate", "block_filler_rate", "content_filler_rate",
                    "intro_dip_rate", "description_ec_rate", "low_listener_rate"},
               "synth.");
    read(sy, "episodes", c.synth.episodes);
    read(sy, "min_sentences", c.synth.min_sentences);
    read(sy, "max_sentences", c.synth.max_sentences);
    read(sy, "ad_free_rate", c.synth.ad_free_rate);
    read(sy, "second_block_rate", c.synth.second_block_rate);
    read(sy, "block_filler_rate", c.synth.block_filler_rate);
    read(sy, "content_filler_rate", c.synth.content_filler_rate);
    read(sy, "intro_dip_rate", c.synth.intro_dip_rate);
    read(sy, "description_ec_rate", c.synth.description_ec_rate);
    read(sy, "low_listener_rate", c.synth.low_listener_rate);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid config: ") + e.what());
  }

  c.train.seed = c.seed;
  c.synth.seed = c.seed;

  if (c.ngram_max != 1 && c.ngram_max != 2) fail(ErrorCode::kParse, "ngram_max must be 1 or 2");
  if (c.threads < 1) fail(ErrorCode::kParse, "threads must be >= 1");
  if (c.decode_mode != "smoothing" && c.decode_mode != "changepoint" &&
      c.decode_mode != "threshold") {
    fail(ErrorCode::kParse, "unknown decode mode '" + c.decode_mode + "'");
  }
  if (c.synth.min_sentences < 150 || c.synth.max_sentences < c.synth.min_sentences) {
    fail(ErrorCode::kParse, "synth sentence range must satisfy 150 <= min <= max");
  }
  return c;
}

json to_json(const PipelineConfig& c) {
  const Paths& p = c.paths;
  return {
      {"paths",
       {{"episodes", p.episodes}, {"retention", p.retention}, {"annotations", p.annotations},
        {"segments", p.segments}, {"model", p.model}, {"input", p.input}, {"probs", p.probs},
        {"pred", p.pred}, {"gold", p.gold}, {"candidates", p.candidates},
        {"references", p.references}, {"ec_labels", p.ec_labels}, {"output", p.output}}},
      {"source", corpus::to_string(c.source)},
      {"seed", c.seed},
      {"threads", c.threads},
      {"dips",
       {{"min_prominence", c.dips.min_prominence}, {"min_distance_s", c.dips.min_distance_s},
        {"window_s", c.dips.window_s}, {"min_listeners", c.dips.min_listeners},
        {"pre_s", c.dips.pre_s}, {"post_s", c.dips.post_s}}},
      {"features", {{"ngram_max", c.ngram_max}, {"with_context", c.with_context}}},
      {"train",
       {{"kind", linear::to_string(c.kind)}, {"epochs", c.train.epochs},
        {"learning_rate", c.train.learning_rate}, {"l2_lambda", c.train.l2_lambda},
        {"shuffle", c.train.shuffle}, {"balance_classes", c.train.balance_classes}}},
      {"smoothing", {{"bandwidth", c.smoothing.bandwidth}, {"threshold", c.smoothing.threshold}}},
      {"changepoint", {{"min_llr", c.min_llr}}},
      {"decode", {{"mode", c.decode_mode}}},
      {"silver", {{"min_gap_s", c.min_gap_s}, {"negative_cap_ratio", c.negative_cap_ratio}}},
      {"rouge", {{"beta", c.beta}}},
      {"synth",
       {{"episodes", c.synth.episodes}, {"min_sentences", c.synth.min_sentences},
        {"max_sentences", c.synth.max_sentences}, {"ad_free_rate", c.synth.ad_free_rate},
        {"second_block_rate", c.synth.second_block_rate},
        {"block_filler_rate", c.synth.block_filler_rate},
        {"content_filler_rate", c.synth.content_filler_rate},
        {"intro_dip_rate", c.synth.intro_dip_rate},
        {"description_ec_rate", c.synth.description_ec_rate},
        {"low_listener_rate", c.synth.low_listener_rate}}},
  };
}

std::string config_hash(const PipelineConfig& config) {
  json j = to_json(config);
  j.erase("paths");
  j.erase("threads");
  return jsonl::content_hash(j.dump());
}

json run(std::string_view command, const PipelineConfig& config) {
  try {
    if (command == "dips") return cmd_dips(config);
    if (command == "segment") return cmd_segment(config);
    if (command == "label") return cmd_label(config);
    if (command == "train") return cmd_train(config);
    if (command == "predict") return cmd_predict(config);
    if (command == "decode") return cmd_decode(config);
    if (command == "silver") return cmd_silver(config);
    if (command == "eval") return cmd_eval(config);
    if (command == "rouge") return cmd_rouge(config);
    if (command == "synth") return cmd_synth(config);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, e.what());
  }
  fail(ErrorCode::kInvalidArgument, "unknown command '" + std::string(command) + "'");
}

std::vector<TextRecord> load_text_records(const std::string& path) {
  std::vector<TextRecord> out;
  jsonl::for_each_record(path, [&](const json& j, std::size_t) {
    if (j.contains("sentences")) {
      const auto id = j.at("episode_id").get<std::string>();
      const auto seg = j.at("segment_index").get<std::size_t>();
      for (const auto& s : j.at("sentences")) {
        TextRecord r;
        r.episode_id = id;
        r.segment_index = seg;
        r.sentence_index = s.at("sentence_index").get<std::size_t>();
        r.text = s.at("text").get<std::string>();
        if (s.contains("marker")) {
          r.marker = std::string(silverset::to_string(
              silverset::parse_marker(s.at("marker").get<std::string>())));
        }
        out.push_back(std::move(r));
      }
      return;
    }
    TextRecord r;
    r.episode_id = j.at("episode_id").get<std::string>();
    if (j.contains("segment_index") && !j.at("segment_index").is_null()) {
      r.segment_index = j.at("segment_index").get<std::size_t>();
    }
    r.sentence_index = j.at("sentence_index").get<std::size_t>();
    r.text = j.value("text", std::string());
    if (j.contains("marker")) {
      r.marker = std::string(silverset::to_string(
          silverset::parse_marker(j.at("marker").get<std::string>())));
    }
    if (j.contains("label")) r.label = corpus::parse_label(j.at("label").get<std::string>());
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<std::string> build_inputs(const std::vector<TextRecord>& records,
                                      bool with_context, bool use_markers) {
  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const auto& r : records) {
    texts.push_back(use_markers && r.marker ? *r.marker + " " + r.text : r.text);
  }
  std::vector<std::string> out;
  out.reserve(records.size());
  std::size_t run_start = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const bool continues =
        i > 0 && records[i].episode_id == records[i - 1].episode_id &&
        records[i].segment_index == records[i - 1].segment_index &&
        records[i].sentence_index == records[i - 1].sentence_index + 1;
    if (!continues) run_start = i;
    out.push_back(features::make_input(
        std::span<const std::string>(texts).subspan(run_start, i - run_start + 1),
        i - run_start, with_context));
  }
  return out;
}

json to_json(const ClassifierBundle& b) {
  return {{"version", kBundleFormatVersion},
          {"with_context", b.with_context},
          {"markers", b.markers},
          {"tfidf", features::to_json(b.tfidf)},
          {"model", linear::to_json(b.model)}};
}

ClassifierBundle bundle_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kBundleFormatVersion) {
      fail(ErrorCode::kParse, "unsupported model bundle version");
    }
    ClassifierBundle b;
    b.with_context = j.at("with_context").get<bool>();
    b.markers = j.at("markers").get<bool>();
    b.tfidf = features::tfidf_from_json(j.at("tfidf"));
    b.model = linear::model_from_json(j.at("model"));
    return b;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid model bundle: ") + e.what());
  }
}

ClassifierBundle load_bundle(const std::string& path) {
  const std::string text = jsonl::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
  return bundle_from_json(j);
}

std::vector<IndexedSegment> load_segments(const std::string& path) {
  std::vector<IndexedSegment> out;
  jsonl::for_each_record(path, [&](const json& j, std::size_t) {
    IndexedSegment s;
    s.segment_index = j.at("segment_index").get<std::size_t>();
    s.segment.episode_id = j.at("episode_id").get<std::string>();
    s.segment.window_start_s = j.at("window_start_s").get<double>();
    s.segment.window_end_s = j.at("window_end_s").get<double>();
    s.segment.dip = dip_from_json(j.at("dip"));
    for (const auto& sj : j.at("sentences")) {
      s.segment.sentences.push_back(sentence_from_json(sj));
    }
    out.push_back(std::move(s));
  });
  return out;
}

}  // namespace ecd::pipeline
