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

#ifndef ECDETECT_CORE_LINEAR_HPP_
#define ECDETECT_CORE_LINEAR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"
#include "core/features.hpp"
#include "json.hpp"

namespace ecd::linear {

enum class ModelKind { kLogistic, kSvm };

std::string_view to_string(ModelKind kind);
ModelKind parse_kind(std::string_view name);

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.1;
  double l2_lambda = 1e-4;
  std::uint64_t seed = 42;
  bool shuffle = true;
  // Inverse class-frequency example weights.
  bool balance_classes = false;
};

struct Example {
  features::FeatureVector x;
  corpus::Label y = corpus::Label::kContent;
};

struct LinearModel {
  ModelKind kind = ModelKind::kLogistic;
  std::vector<double> weights;  // dense, indexed by feature column
  double bias = 0.0;
  TrainConfig config;

  double score(const features::FeatureVector& x) const;
};

// Regularised objective value after each epoch.
struct TrainTrace {
  std::vector<double> epoch_loss;
};

// Logistic: SGD on L2-regularised log loss at a fixed rate, with the L2 term
// applied as a proximal shrink so large lambdas stay stable.
// SVM: Pegasos-style subgradient steps on L2-regularised hinge loss with
// rate 1/(lambda t) (fixed learning_rate when lambda is 0); the bias is
// regularised like a constant feature.
// Throws Error(kDegenerate) unless both classes are present.
LinearModel train(ModelKind kind, std::span<const Example> examples,
                  const TrainConfig& config, TrainTrace* trace = nullptr);

double sigmoid(double z);

// sigmoid(w.x + b) for both kinds. For SVMs the value is monotone in the
// margin but not calibrated.
double predict_proba(const LinearModel& model, const features::FeatureVector& x);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::size_t true_pos = 0;
  std::size_t false_pos = 0;
  std::size_t false_neg = 0;
  std::size_t true_neg = 0;
};

// Micro-averaged with EC as the positive class.
Metrics evaluate(std::span<const corpus::Label> preds,
                 std::span<const corpus::Label> gold);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// Mean weighted log loss plus (lambda / 2) ||w||^2 and its exact gradient.
// `example_weights` may be empty (all ones).
LossGradient logistic_objective(std::span<const Example> examples,
                                std::span<const double> weights, double bias,
                                double l2_lambda,
                                std::span<const double> example_weights = {});

nlohmann::json to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);

}  // namespace ecd::linear

#endif  // ECDETECT_CORE_LINEAR_HPP_
