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

#ifndef ECDETECT_CORE_PIPELINE_HPP_
#define ECDETECT_CORE_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"
#include "core/dipdetect.hpp"
#include "core/docdecode.hpp"
#include "core/features.hpp"
#include "core/linear.hpp"
#include "core/synth.hpp"
#include "json.hpp"

// File-based pipeline stages. Each stage reads its inputs, writes one output
// artifact that starts with a header record, and returns a JSON summary.
namespace ecd::pipeline {

inline constexpr std::string_view kToolName = "ecdetect";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct Paths {
  std::string episodes;
  std::string retention;
  std::string annotations;
  std::string segments;
  std::string model;
  std::string input;
  std::string probs;
  std::string pred;
  std::string gold;
  std::string candidates;
  std::string references;
  std::string ec_labels;
  std::string output;
};

struct PipelineConfig {
  Paths paths;
  corpus::Source source = corpus::Source::kDescription;
  std::uint64_t seed = 42;
  int threads = 1;
  dipdetect::DipOptions dips;
  int ngram_max = 1;
  bool with_context = false;
  linear::ModelKind kind = linear::ModelKind::kLogistic;
  linear::TrainConfig train;
  docdecode::SmoothingConfig smoothing;
  double min_llr = 2.0;
  std::string decode_mode = "smoothing";  // smoothing | changepoint | threshold
  double min_gap_s = 300.0;
  double negative_cap_ratio = 2.0;
  double beta = 1.2;
  synth::SynthConfig synth;
};

// Missing keys take defaults; unknown keys are rejected with Error(kParse).
// The top-level seed is propagated to training and synthesis.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& config);

// Hash of everything that can change outputs (paths and threads excluded).
std::string config_hash(const PipelineConfig& config);

inline constexpr std::string_view kCommands[] = {
    "dips", "segment", "label", "train", "predict",
    "decode", "silver", "eval", "rouge", "synth"};

// Runs one stage. Throws ecd::Error on failure.
nlohmann::json run(std::string_view command, const PipelineConfig& config);

// One sentence-level record from any sentence-bearing file (segment, label,
// silver and segments outputs).
struct TextRecord {
  std::string episode_id;
  std::optional<std::size_t> segment_index;
  std::size_t sentence_index = 0;
  std::string text;
  std::optional<std::string> marker;
  std::optional<corpus::Label> label;
};

std::vector<TextRecord> load_text_records(const std::string& path);

// Classifier inputs for each record. Consecutive records sharing episode and
// segment form a document; a record's context is the previous record only
// when that record is the immediately preceding sentence.
std::vector<std::string> build_inputs(const std::vector<TextRecord>& records,
                                      bool with_context, bool use_markers);

// Trained classifier plus the featurizer and input settings it expects.
struct ClassifierBundle {
  features::TfidfModel tfidf;
  linear::LinearModel model;
  bool with_context = false;
  bool markers = false;
};

nlohmann::json to_json(const ClassifierBundle& bundle);
ClassifierBundle bundle_from_json(const nlohmann::json& j);
ClassifierBundle load_bundle(const std::string& path);

struct IndexedSegment {
  std::size_t segment_index = 0;  // ordinal among the episode's segments
  dipdetect::DipSegment segment;
};

std::vector<IndexedSegment> load_segments(const std::string& path);

}  // namespace ecd::pipeline

#endif  // ECDETECT_CORE_PIPELINE_HPP_
