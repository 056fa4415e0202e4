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

// Command-line driver for the ecdetect pipeline stages.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecdetect/ecdetect.h"
#include "json.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;

int exit_code(ecd_status status) {
  switch (status) {
    case ECD_OK:
      return kExitOk;
    case ECD_DEGENERATE:
      return kExitDegenerate;
    case ECD_INTERNAL:
      return kExitInternal;
    default:
      return kExitUsage;
  }
}

// Options that overlay a value onto the config at a JSON pointer when given.
class Overlay {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& pointer,
                   const std::string& help) {
    auto value = std::make_shared<std::optional<T>>();
    appliers_.push_back([value, pointer](json& config) {
      if (*value) config[json::json_pointer(pointer)] = **value;
    });
    return app->add_option(flag, *value, help);
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& flag, const std::string& pointer,
                        const std::string& help) {
    auto value = std::make_shared<std::optional<bool>>();
    appliers_.push_back([value, pointer](json& config) {
      if (*value) config[json::json_pointer(pointer)] = **value;
    });
    return app->add_flag(flag, *value, help);
  }

  void apply(json& config) const {
    for (const auto& fn : appliers_) fn(config);
  }

 private:
  std::vector<std::function<void(json&)>> appliers_;
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  Overlay overlay;
};

void add_dip_options(Command& c) {
  c.overlay.add<double>(c.app, "--min-prominence", "/dips/min_prominence",
                        "Minimum dip prominence (fraction of listeners)");
  c.overlay.add<std::size_t>(c.app, "--min-distance", "/dips/min_distance_s",
                             "Minimum seconds between dips");
  c.overlay.add<std::size_t>(c.app, "--window", "/dips/window_s",
                             "Boundary search window in seconds");
  c.overlay.add<long long>(c.app, "--min-listeners", "/dips/min_listeners",
                           "Skip curves with fewer listeners");
}

void add_source(Command& c) {
  c.overlay.add<std::string>(c.app, "--source", "/source", "description or transcript")
      ->check(CLI::IsMember({"description", "transcript"}));
}

std::vector<std::unique_ptr<Command>> make_commands(CLI::App& app) {
  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](const char* name, const char* help) -> Command& {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->app = app.add_subcommand(name, help);
    commands.push_back(std::move(c));
    return *commands.back();
  };

  Command& dips = make("dips", "Detect retention dips and extract transcript segments");
  dips.overlay.add<std::string>(dips.app, "--episodes", "/paths/episodes", "Episodes JSONL");
  dips.overlay.add<std::string>(dips.app, "--retention", "/paths/retention", "Retention JSONL");
  add_dip_options(dips);

  Command& segment = make("segment", "Split descriptions or transcripts into sentences");
  segment.overlay.add<std::string>(segment.app, "--episodes", "/paths/episodes",
                                   "Episodes JSONL");
  add_source(segment);

  Command& label = make("label", "Label sentences from annotated EC spans");
  label.overlay.add<std::string>(label.app, "--episodes", "/paths/episodes", "Episodes JSONL");
  label.overlay.add<std::string>(label.app, "--annotations", "/paths/annotations",
                                 "Annotations JSONL");
  label.overlay.add<std::string>(label.app, "--segments", "/paths/segments",
                                 "Restrict to dip segments (transcripts only)");
  add_source(label);

  Command& train = make("train", "Train a sentence classifier");
  train.overlay.add<std::string>(train.app, "--input", "/paths/input", "Labeled sentences JSONL");
  train.overlay.add<std::string>(train.app, "--kind", "/train/kind", "logistic or svm")
      ->check(CLI::IsMember({"logistic", "lr", "svm"}));
  train.overlay.add<int>(train.app, "--ngram-max", "/features/ngram_max", "1 or 2");
  train.overlay.add_flag(train.app, "--with-context{true},--no-context{false}",
                         "/features/with_context", "Prepend the previous sentence");
  train.overlay.add<int>(train.app, "--epochs", "/train/epochs", "Training epochs");
  train.overlay.add<double>(train.app, "--learning-rate", "/train/learning_rate",
                            "SGD learning rate");
  train.overlay.add<double>(train.app, "--l2", "/train/l2_lambda", "L2 penalty");
  train.overlay.add_flag(train.app, "--balance{true}", "/train/balance_classes",
                         "Weight classes inversely to frequency");

  Command& predict = make("predict", "Score sentences with a trained classifier");
  predict.overlay.add<std::string>(predict.app, "--model", "/paths/model", "Model file");
  predict.overlay.add<std::string>(predict.app, "--input", "/paths/input", "Sentences JSONL");

  Command& decode = make("decode", "Turn sentence probabilities into document labels");
  decode.overlay.add<std::string>(decode.app, "--probs", "/paths/probs", "Probabilities JSONL");
  decode.overlay.add<std::string>(decode.app, "--mode", "/decode/mode",
                                  "smoothing, changepoint or threshold")
      ->check(CLI::IsMember({"smoothing", "changepoint", "threshold"}));
  decode.overlay.add<double>(decode.app, "--bandwidth", "/smoothing/bandwidth",
                             "Kernel bandwidth in sentences");
  decode.overlay.add<double>(decode.app, "--threshold", "/smoothing/threshold",
                             "Decision threshold");
  decode.overlay.add<double>(decode.app, "--min-llr", "/changepoint/min_llr",
                             "Minimum change-point statistic");

  Command& silver = make("silver", "Build a silver training set from dip segments");
  silver.overlay.add<std::string>(silver.app, "--segments", "/paths/segments",
                                  "Segments JSONL from dips");
  silver.overlay.add<std::string>(silver.app, "--episodes", "/paths/episodes",
                                  "Episodes JSONL");
  silver.overlay.add<std::string>(silver.app, "--model", "/paths/model",
                                  "Marker-aware labeling model");
  silver.overlay.add<std::string>(silver.app, "--probs", "/paths/probs",
                                  "Precomputed segment probabilities");
  silver.overlay.add<double>(silver.app, "--min-gap", "/silver/min_gap_s",
                             "Minimum seconds between negatives and dips");
  silver.overlay.add<double>(silver.app, "--negative-ratio", "/silver/negative_cap_ratio",
                             "Negatives per segment sentence");

  Command& eval = make("eval", "Compare predicted labels against gold labels");
  eval.overlay.add<std::string>(eval.app, "--pred", "/paths/pred", "Predicted labels JSONL");
  eval.overlay.add<std::string>(eval.app, "--gold", "/paths/gold", "Gold labels JSONL");

  Command& rouge = make("rouge", "ROUGE-L between candidate and reference summaries");
  rouge.overlay.add<std::string>(rouge.app, "--candidates", "/paths/candidates",
                                 "One summary per line");
  rouge.overlay.add<std::string>(rouge.app, "--references", "/paths/references",
                                 "One reference per line");
  rouge.overlay.add<std::string>(rouge.app, "--ec-labels", "/paths/ec_labels",
                                 "Per-summary sentence labels JSONL");
  rouge.overlay.add<double>(rouge.app, "--beta", "/rouge/beta", "Recall weight");

  Command& synth = make("synth", "Generate a synthetic corpus into the output directory");
  synth.overlay.add<std::size_t>(synth.app, "--episodes", "/synth/episodes",
                                 "Number of episodes");

  return commands;
}

std::optional<json> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "ecdetect: error: cannot open config file " << path << "\n";
    return std::nullopt;
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    std::cerr << "ecdetect: error: " << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extraneous-content detection for podcast transcripts and descriptions",
               "ecdetect"};
  app.set_version_flag("--version", std::string(ecd_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Overlay global;
  app.add_option("--config", config_path, "JSON config file");
  global.add<std::uint64_t>(&app, "--seed", "/seed", "Random seed");
  global.add<int>(&app, "--threads", "/threads", "Worker threads");
  global.add<std::string>(&app, "--output", "/paths/output", "Output file or directory");

  auto commands = make_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  json config = json::object();
  if (!config_path.empty()) {
    auto loaded = read_config(config_path);
    if (!loaded) return kExitUsage;
    config = std::move(*loaded);
    if (!config.is_object()) {
      std::cerr << "ecdetect: error: config must be a JSON object\n";
      return kExitUsage;
    }
  }
  global.apply(config);

  const Command* selected = nullptr;
  for (const auto& c : commands) {
    if (c->app->parsed()) selected = c.get();
  }
  selected->overlay.apply(config);

  ecd_pipeline* pipeline = nullptr;
  ecd_status status = ecd_pipeline_create(config.dump().c_str(), &pipeline);
  if (status == ECD_OK) status = ecd_pipeline_run(pipeline, selected->name.c_str());
  if (status != ECD_OK) {
    std::cerr << "ecdetect " << selected->name << ": error: " << ecd_last_error() << "\n";
    ecd_pipeline_free(pipeline);
    return exit_code(status);
  }
  const char* summary = nullptr;
  ecd_pipeline_summary(pipeline, &summary);
  std::cout << json::parse(summary).dump(2) << "\n";
  ecd_pipeline_free(pipeline);
  return kExitOk;
}
