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

#include "ecdetect/ecdetect.h"

#include <algorithm>
#include <exception>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "core/docdecode.hpp"
#include "core/error.hpp"
#include "core/pipeline.hpp"
#include "core/rouge.hpp"

struct ecd_pipeline {
  ecd::pipeline::PipelineConfig config;
  std::string config_json;
  std::string summary;
};

struct ecd_classifier {
  ecd::pipeline::ClassifierBundle bundle;
};

namespace {

thread_local std::string g_last_error;

ecd_status to_status(ecd::ErrorCode code) {
  switch (code) {
    case ecd::ErrorCode::kInvalidArgument:
      return ECD_INVALID_ARGUMENT;
    case ecd::ErrorCode::kIo:
      return ECD_IO;
    case ecd::ErrorCode::kParse:
      return ECD_PARSE;
    case ecd::ErrorCode::kDegenerate:
      return ECD_DEGENERATE;
    case ecd::ErrorCode::kInternal:
      return ECD_INTERNAL;
  }
  return ECD_INTERNAL;
}

template <typename Fn>
ecd_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ECD_OK;
  } catch (const ecd::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return ECD_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ECD_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ECD_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ECD_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) ecd::fail(ecd::ErrorCode::kInvalidArgument, what);
}

std::span<const double> probs_span(const double* probs, size_t n) {
  require(probs != nullptr || n == 0, "null probability array");
  return {probs, n};
}

ecd::docdecode::ProbSequence sequence(const double* probs, size_t n) {
  const auto span = probs_span(probs, n);
  return {"", std::vector<double>(span.begin(), span.end())};
}

void write_labels(const std::vector<ecd::corpus::Label>& labels, int* out) {
  for (size_t i = 0; i < labels.size(); ++i) {
    out[i] = labels[i] == ecd::corpus::Label::kEc ? ECD_LABEL_EC : ECD_LABEL_CONTENT;
  }
}

ecd::dipdetect::RetentionCurve curve(const double* retention, size_t n) {
  require(retention != nullptr && n > 0, "empty retention curve");
  ecd::dipdetect::RetentionCurve c;
  c.values.assign(retention, retention + n);
  ecd::dipdetect::validate(c);
  return c;
}

}  // namespace

extern "C" {

const char* ecd_version(void) { return ecd::pipeline::kToolVersion.data(); }

const char* ecd_status_name(ecd_status status) {
  switch (status) {
    case ECD_OK:
      return "ok";
    case ECD_INVALID_ARGUMENT:
      return "invalid argument";
    case ECD_IO:
      return "i/o error";
    case ECD_PARSE:
      return "parse error";
    case ECD_DEGENERATE:
      return "degenerate data";
    case ECD_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* ecd_last_error(void) { return g_last_error.c_str(); }

ecd_status ecd_pipeline_create(const char* config_json, ecd_pipeline** out) {
  return guard([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    nlohmann::json j = nlohmann::json::object();
    if (config_json != nullptr && *config_json != '\0') {
      try {
        j = nlohmann::json::parse(config_json);
      } catch (const nlohmann::json::exception& e) {
        ecd::fail(ecd::ErrorCode::kParse, std::string("invalid config JSON: ") + e.what());
      }
    }
    auto p = std::make_unique<ecd_pipeline>();
    p->config = ecd::pipeline::config_from_json(j);
    p->config_json = ecd::pipeline::to_json(p->config).dump();
    *out = p.release();
  });
}

void ecd_pipeline_free(ecd_pipeline* pipeline) { delete pipeline; }

ecd_status ecd_pipeline_config(ecd_pipeline* pipeline, const char** out_json) {
  return guard([&] {
    require(pipeline != nullptr && out_json != nullptr, "null argument");
    *out_json = pipeline->config_json.c_str();
  });
}

ecd_status ecd_pipeline_run(ecd_pipeline* pipeline, const char* command) {
  return guard([&] {
    require(pipeline != nullptr && command != nullptr, "null argument");
    pipeline->summary = ecd::pipeline::run(command, pipeline->config).dump();
  });
}

ecd_status ecd_pipeline_summary(ecd_pipeline* pipeline, const char** out_json) {
  return guard([&] {
    require(pipeline != nullptr && out_json != nullptr, "null argument");
    *out_json = pipeline->summary.c_str();
  });
}

ecd_status ecd_classifier_load(const char* path, ecd_classifier** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    auto c = std::make_unique<ecd_classifier>();
    c->bundle = ecd::pipeline::load_bundle(path);
    *out = c.release();
  });
}

void ecd_classifier_free(ecd_classifier* classifier) { delete classifier; }

ecd_status ecd_classifier_predict(const ecd_classifier* classifier,
                                  const char* sentence, double* out_prob) {
  return ecd_classifier_predict_document(classifier, &sentence, 1, out_prob);
}

ecd_status ecd_classifier_predict_document(const ecd_classifier* classifier,
                                           const char* const* sentences, size_t n,
                                           double* out_probs) {
  return guard([&] {
    require(classifier != nullptr && (n == 0 || (sentences != nullptr && out_probs != nullptr)),
            "null argument");
    const auto& b = classifier->bundle;
    std::vector<ecd::pipeline::TextRecord> records(n);
    for (size_t i = 0; i < n; ++i) {
      require(sentences[i] != nullptr, "null sentence");
      records[i].sentence_index = i;
      records[i].text = sentences[i];
    }
    const auto inputs = ecd::pipeline::build_inputs(records, b.with_context, false);
    for (size_t i = 0; i < n; ++i) {
      out_probs[i] = ecd::linear::predict_proba(b.model, ecd::features::transform(b.tfidf, inputs[i]));
    }
  });
}

ecd_status ecd_detect_change_point(const double* probs, size_t n, double min_llr,
                                   size_t* out_tau, size_t* out_best_tau,
                                   double* out_llr) {
  return guard([&] {
    require(out_tau != nullptr, "null output");
    const auto r = ecd::docdecode::detect_change_point(sequence(probs, n), min_llr);
    *out_tau = r.tau.value_or(0);
    if (out_best_tau != nullptr) *out_best_tau = r.best_tau;
    if (out_llr != nullptr) *out_llr = r.r_tau;
  });
}

ecd_status ecd_smooth(const double* probs, size_t n, double bandwidth, double* out) {
  return guard([&] {
    require(out != nullptr, "null output");
    const auto s = ecd::docdecode::smooth(probs_span(probs, n), bandwidth);
    std::copy(s.begin(), s.end(), out);
  });
}

ecd_status ecd_decode_transcript(const double* probs, size_t n, double bandwidth,
                                 double threshold, int* out_labels) {
  return guard([&] {
    require(out_labels != nullptr, "null output");
    write_labels(ecd::docdecode::decode_transcript(sequence(probs, n), {bandwidth, threshold}),
                 out_labels);
  });
}

ecd_status ecd_decode_description(const double* probs, size_t n, double min_llr,
                                  int* out_labels) {
  return guard([&] {
    require(out_labels != nullptr, "null output");
    write_labels(ecd::docdecode::decode_description(sequence(probs, n), min_llr), out_labels);
  });
}

ecd_status ecd_rouge_l(const char* candidate, const char* reference, double beta,
                       double* out_recall, double* out_precision, double* out_f) {
  return guard([&] {
    require(candidate != nullptr && reference != nullptr, "null argument");
    const auto s = ecd::rouge::rouge_l(candidate, reference, beta);
    if (out_recall != nullptr) *out_recall = s.recall;
    if (out_precision != nullptr) *out_precision = s.precision;
    if (out_f != nullptr) *out_f = s.f;
  });
}

ecd_status ecd_find_dip_peaks(const double* retention, size_t n, double min_prominence,
                              size_t min_distance_s, size_t* out_peaks, size_t capacity,
                              size_t* out_count) {
  return guard([&] {
    require(out_count != nullptr && (capacity == 0 || out_peaks != nullptr), "null output");
    const auto peaks =
        ecd::dipdetect::find_dip_peaks(curve(retention, n), min_prominence, min_distance_s);
    for (size_t i = 0; i < peaks.size() && i < capacity; ++i) out_peaks[i] = peaks[i];
    *out_count = peaks.size();
  });
}

ecd_status ecd_estimate_dip_bounds(const double* retention, size_t n, size_t peak_s,
                                   size_t window_s, double* out_start_s, double* out_end_s,
                                   int* out_recovered) {
  return guard([&] {
    require(out_start_s != nullptr && out_end_s != nullptr, "null output");
    const auto d = ecd::dipdetect::estimate_dip_bounds(curve(retention, n), peak_s, window_s);
    *out_start_s = d.start_s;
    *out_end_s = d.end_s;
    if (out_recovered != nullptr) *out_recovered = d.recovered() ? 1 : 0;
  });
}

}  // extern "C"
