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

#include "core/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "core/error.hpp"

namespace ecd::linear {
namespace {

constexpr int kModelFormatVersion = 1;

double sign_of(corpus::Label y) { return y == corpus::Label::kEc ? 1.0 : -1.0; }

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

double sparse_dot(const std::vector<double>& w, const features::FeatureVector& x) {
  double s = 0.0;
  for (const auto& [idx, v] : x.entries) {
    if (idx < w.size()) s += w[idx] * v;
  }
  return s;
}

std::vector<double> class_weights(std::span<const Example> examples, bool balance) {
  std::vector<double> cw(examples.size(), 1.0);
  if (!balance) return cw;
  std::size_t pos = 0;
  for (const auto& e : examples) pos += e.y == corpus::Label::kEc ? 1 : 0;
  const double n = static_cast<double>(examples.size());
  const double w_pos = n / (2.0 * static_cast<double>(pos));
  const double w_neg = n / (2.0 * static_cast<double>(examples.size() - pos));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    cw[i] = examples[i].y == corpus::Label::kEc ? w_pos : w_neg;
  }
  return cw;
}

double hinge_objective(std::span<const Example> examples,
                       const std::vector<double>& w, double b, double lambda,
                       const std::vector<double>& cw) {
  double loss = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const double m = sign_of(examples[i].y) * (sparse_dot(w, examples[i].x) + b);
    loss += cw[i] * std::max(0.0, 1.0 - m);
  }
  double sq = b * b;
  for (double v : w) sq += v * v;
  return loss / static_cast<double>(examples.size()) + 0.5 * lambda * sq;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kLogistic ? "logistic" : "svm";
}

ModelKind parse_kind(std::string_view name) {
  if (name == "logistic" || name == "lr") return ModelKind::kLogistic;
  if (name == "svm") return ModelKind::kSvm;
  fail(ErrorCode::kInvalidArgument, "unknown model kind '" + std::string(name) + "'");
}

double LinearModel::score(const features::FeatureVector& x) const {
  return sparse_dot(weights, x) + bias;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double predict_proba(const LinearModel& model, const features::FeatureVector& x) {
  return sigmoid(model.score(x));
}

LossGradient logistic_objective(std::span<const Example> examples,
                                std::span<const double> weights, double bias,
                                double l2_lambda,
                                std::span<const double> example_weights) {
  LossGradient out;
  out.grad_w.assign(weights.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const double c = example_weights.empty() ? 1.0 : example_weights[i];
    const double y = sign_of(examples[i].y);
    double z = bias;
    for (const auto& [idx, v] : examples[i].x.entries) z += weights[idx] * v;
    out.loss += c * log1p_exp_neg(y * z) * inv_n;
    // d/dz log(1 + exp(-y z)) = -y sigmoid(-y z)
    const double g = -y * sigmoid(-y * z) * c * inv_n;
    for (const auto& [idx, v] : examples[i].x.entries) out.grad_w[idx] += g * v;
    out.grad_b += g;
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out.loss += 0.5 * l2_lambda * weights[k] * weights[k];
    out.grad_w[k] += l2_lambda * weights[k];
  }
  return out;
}

LinearModel train(ModelKind kind, std::span<const Example> examples,
                  const TrainConfig& config, TrainTrace* trace) {
  if (config.epochs < 1 || !(config.learning_rate > 0.0) ||
      !(config.l2_lambda >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "invalid training configuration");
  }
  std::size_t pos = 0;
  std::uint32_t dim = 0;
  for (const auto& e : examples) {
    pos += e.y == corpus::Label::kEc ? 1 : 0;
    if (!e.x.entries.empty()) dim = std::max(dim, e.x.entries.back().first + 1);
  }
  if (pos == 0 || pos == examples.size()) {
    fail(ErrorCode::kDegenerate, "degenerate training set");
  }

  const std::vector<double> cw = class_weights(examples, config.balance_classes);
  const double lambda = config.l2_lambda;

  // w = scale * v keeps the L2 shrink O(1) per step.
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  auto materialize = [&] {
    std::vector<double> w(v);
    for (double& x : w) x *= scale;
    return w;
  };

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::uint64_t t = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
      }
    }
    for (std::size_t idx : order) {
      ++t;
      const Example& ex = examples[idx];
      const double y = sign_of(ex.y);
      double z = bias;
      for (const auto& [k, val] : ex.x.entries) z += scale * v[k] * val;

      if (kind == ModelKind::kLogistic) {
        const double eta = config.learning_rate;
        const double g = -y * sigmoid(-y * z) * cw[idx];
        for (const auto& [k, val] : ex.x.entries) v[k] -= eta * g * val / scale;
        bias -= eta * g;
        scale /= 1.0 + eta * lambda;
      } else {
        const double eta =
            lambda > 0.0 ? 1.0 / (lambda * static_cast<double>(t)) : config.learning_rate;
        const bool violated = y * z < 1.0;
        if (lambda > 0.0) {
          const double factor = 1.0 - eta * lambda;
          if (factor <= 0.0) {
            std::fill(v.begin(), v.end(), 0.0);
            scale = 1.0;
            bias = 0.0;
          } else {
            scale *= factor;
            bias *= factor;
          }
        }
        if (violated) {
          for (const auto& [k, val] : ex.x.entries) {
            v[k] += eta * y * cw[idx] * val / scale;
          }
          bias += eta * y * cw[idx];
        }
      }
      if (scale < 1e-9) {
        for (double& x : v) x *= scale;
        scale = 1.0;
      }
    }
    if (trace != nullptr) {
      const auto w = materialize();
      trace->epoch_loss.push_back(
          kind == ModelKind::kLogistic
              ? logistic_objective(examples, w, bias, lambda, cw).loss
              : hinge_objective(examples, w, bias, lambda, cw));
    }
  }

  LinearModel model;
  model.kind = kind;
  model.weights = materialize();
  model.bias = bias;
  model.config = config;
  for (double w : model.weights) {
    if (!std::isfinite(w)) fail(ErrorCode::kInternal, "training diverged");
  }
  return model;
}

Metrics evaluate(std::span<const corpus::Label> preds,
                 std::span<const corpus::Label> gold) {
  if (preds.size() != gold.size()) {
    fail(ErrorCode::kInvalidArgument, "prediction and gold lengths differ");
  }
  if (preds.empty()) fail(ErrorCode::kInvalidArgument, "nothing to evaluate");
  Metrics m;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == corpus::Label::kEc;
    const bool g = gold[i] == corpus::Label::kEc;
    if (p && g) ++m.true_pos;
    if (p && !g) ++m.false_pos;
    if (!p && g) ++m.false_neg;
    if (!p && !g) ++m.true_neg;
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  m.precision = ratio(m.true_pos, m.true_pos + m.false_pos);
  m.recall = ratio(m.true_pos, m.true_pos + m.false_neg);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.accuracy = ratio(m.true_pos + m.true_neg, preds.size());
  return m;
}

nlohmann::json to_json(const LinearModel& model) {
  nlohmann::json weights = nlohmann::json::array();
  for (std::size_t k = 0; k < model.weights.size(); ++k) {
    if (model.weights[k] != 0.0) weights.push_back({k, model.weights[k]});
  }
  const TrainConfig& c = model.config;
  return {{"version", kModelFormatVersion},
          {"kind", to_string(model.kind)},
          {"dimension", model.weights.size()},
          {"weights", std::move(weights)},
          {"bias", model.bias},
          {"calibrated", model.kind == ModelKind::kLogistic},
          {"config",
           {{"epochs", c.epochs},
            {"learning_rate", c.learning_rate},
            {"l2_lambda", c.l2_lambda},
            {"seed", c.seed},
            {"shuffle", c.shuffle},
            {"balance_classes", c.balance_classes}}}};
}

LinearModel model_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kModelFormatVersion) {
    fail(ErrorCode::kParse, "unsupported linear model version");
  }
  LinearModel m;
  m.kind = parse_kind(j.at("kind").get<std::string>());
  m.weights.assign(j.at("dimension").get<std::size_t>(), 0.0);
  for (const auto& pair : j.at("weights")) {
    const auto k = pair.at(0).get<std::size_t>();
    if (k >= m.weights.size()) fail(ErrorCode::kParse, "weight index out of range");
    m.weights[k] = pair.at(1).get<double>();
  }
  m.bias = j.at("bias").get<double>();
  const auto& c = j.at("config");
  m.config.epochs = c.at("epochs").get<int>();
  m.config.learning_rate = c.at("learning_rate").get<double>();
  m.config.l2_lambda = c.at("l2_lambda").get<double>();
  m.config.seed = c.at("seed").get<std::uint64_t>();
  m.config.shuffle = c.at("shuffle").get<bool>();
  m.config.balance_classes = c.value("balance_classes", false);
  return m;
}

}  // namespace ecd::linear
