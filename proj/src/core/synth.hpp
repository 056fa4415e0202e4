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

#ifndef ECDETECT_CORE_SYNTH_HPP_
#define ECDETECT_CORE_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "core/corpus.hpp"
#include "core/dipdetect.hpp"
#include "json.hpp"

// Synthetic podcast corpus with planted extraneous content: templated ad and
// promo sentences with their own vocabulary, inserted as contiguous blocks
// into transcripts (with a matching retention dip) and as a suffix of
// descriptions. Generation is a pure function of (seed, episode index).
namespace ecd::synth {

struct SynthConfig {
  std::size_t episodes = 2000;
  std::uint64_t seed = 42;
  std::size_t min_sentences = 150;
  std::size_t max_sentences = 260;
  double ad_free_rate = 0.15;        // transcripts without any ad block
  double second_block_rate = 0.3;
  double block_filler_rate = 0.25;   // blocks with one neutral interior sentence
  double content_filler_rate = 0.04;
  double intro_dip_rate = 0.1;       // dips at the start that hold no EC
  double description_ec_rate = 0.6;
  double low_listener_rate = 0.02;
};

// One planted dip in retention, aligned with an ad block when has_ec is set.
struct PlantedDip {
  double start_s = 0.0;  // top of the falling ramp
  double end_s = 0.0;    // top of the recovering ramp
  double ramp_s = 0.0;
  double depth = 0.0;
  bool has_ec = false;
};

struct SynthEpisode {
  corpus::Episode episode;
  std::vector<corpus::Annotation> annotations;  // description, then transcript
  dipdetect::RetentionCurve curve;
  std::vector<PlantedDip> dips;
};

SynthEpisode generate_episode(const SynthConfig& config, std::size_t index);

// Baseline (exponentially decaying unless `flat`) with piecewise-linear
// notches for each dip plus uniform noise of the given amplitude. A notch
// drops by `depth` over the ramp, sinks a further 40% toward the middle of its
// floor and mirrors that on the way back up.
std::vector<double> render_retention(std::size_t duration_s,
                                     const std::vector<PlantedDip>& dips,
                                     double noise, std::uint64_t seed,
                                     bool flat = false);

// A single-dip curve for boundary-estimation checks.
struct PlantedCurve {
  dipdetect::RetentionCurve curve;
  PlantedDip dip;
};
PlantedCurve planted_dip_curve(std::uint64_t seed);

// Writes episodes.jsonl, annotations.jsonl and retention.jsonl into `dir`,
// each starting with `header` when it is not null.
void write_corpus(const SynthConfig& config, const std::filesystem::path& dir,
                  const nlohmann::json& header = nullptr);

}  // namespace ecd::synth

#endif  // ECDETECT_CORE_SYNTH_HPP_
