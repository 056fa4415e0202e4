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

#include "core/docdecode.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace ecd::docdecode {
namespace {

// Maximised Bernoulli log-likelihood of k ones among n, with 0 log 0 = 0.
double bernoulli_mle_loglik(std::size_t k, std::size_t n) {
  if (k == 0 || k == n) return 0.0;
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  return kk * std::log(kk / nn) + (nn - kk) * std::log((nn - kk) / nn);
}

}  // namespace

void validate(std::span<const double> probs) {
  if (probs.empty()) fail(ErrorCode::kInvalidArgument, "empty probability sequence");
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "probability outside [0, 1]");
    }
  }
}

std::vector<double> smooth(std::span<const double> probs, double bandwidth) {
  validate(probs);
  if (!(bandwidth > 0.0)) fail(ErrorCode::kInvalidArgument, "bandwidth must be > 0");
  const std::size_t n = probs.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double u = (static_cast<double>(i) - static_cast<double>(j)) / bandwidth;
      const double k = std::exp(-0.5 * u * u);
      num += k * probs[j];
      den += k;
    }
    out[i] = std::clamp(num / den, 0.0, 1.0);
  }
  return out;
}

ProbSequence smooth(const ProbSequence& seq, const SmoothingConfig& cfg) {
  return ProbSequence{seq.episode_id, smooth(seq.probs, cfg.bandwidth)};
}

std::vector<corpus::Label> threshold_labels(std::span<const double> probs,
                                            double threshold) {
  std::vector<corpus::Label> out;
  out.reserve(probs.size());
  for (double p : probs) {
    out.push_back(p >= threshold ? corpus::Label::kEc : corpus::Label::kContent);
  }
  return out;
}

std::vector<corpus::Label> decode_transcript(const ProbSequence& seq,
                                             const SmoothingConfig& cfg) {
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "threshold must lie in (0, 1)");
  }
  return threshold_labels(smooth(seq.probs, cfg.bandwidth), cfg.threshold);
}

double change_point_llr(std::span<const unsigned char> x, std::size_t tau) {
  const std::size_t n = x.size();
  if (tau < 1 || tau >= n) {
    fail(ErrorCode::kInvalidArgument, "change point must lie in [1, n-1]");
  }
  std::size_t k_pre = 0;
  std::size_t k_all = 0;
  for (std::size_t i = 0; i < n; ++i) {
    k_all += x[i];
    if (i < tau) k_pre += x[i];
  }
  return bernoulli_mle_loglik(k_pre, tau) +
         bernoulli_mle_loglik(k_all - k_pre, n - tau) -
         bernoulli_mle_loglik(k_all, n);
}

ChangePointResult detect_change_point(const ProbSequence& seq, double min_llr) {
  validate(seq.probs);
  const std::size_t n = seq.probs.size();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "change point needs at least 2 sentences");
  if (!(min_llr >= 0.0)) fail(ErrorCode::kInvalidArgument, "min_llr must be >= 0");

  // prefix[i] = number of EC observations among the first i sentences.
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + (seq.probs[i] >= 0.5 ? 1 : 0);
  }
  const std::size_t k_all = prefix[n];
  const double null_ll = bernoulli_mle_loglik(k_all, n);

  ChangePointResult r;
  r.r_tau = -INFINITY;
  for (std::size_t tau = 1; tau < n; ++tau) {
    const double llr = bernoulli_mle_loglik(prefix[tau], tau) +
                       bernoulli_mle_loglik(k_all - prefix[tau], n - tau) - null_ll;
    if (llr > r.r_tau + kLlrTieTolerance) {
      r.r_tau = llr;
      r.best_tau = tau;
    }
  }
  r.theta_pre = static_cast<double>(prefix[r.best_tau]) /
                static_cast<double>(r.best_tau);
  r.theta_post = static_cast<double>(k_all - prefix[r.best_tau]) /
                 static_cast<double>(n - r.best_tau);
  r.accepted = r.r_tau >= min_llr && r.theta_post > r.theta_pre;
  if (r.accepted) r.tau = r.best_tau;
  return r;
}

std::vector<corpus::Label> decode_description(const ProbSequence& seq,
                                              double min_llr) {
  validate(seq.probs);
  if (seq.probs.size() >= 2) {
    const ChangePointResult cp = detect_change_point(seq, min_llr);
    if (cp.accepted) {
      std::vector<corpus::Label> out(seq.probs.size(), corpus::Label::kContent);
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(*cp.tau), out.end(),
                corpus::Label::kEc);
      return out;
    }
  }
  return threshold_labels(seq.probs, 0.5);
}

bool document_match(std::span<const corpus::Label> pred,
                    std::span<const corpus::Label> gold) {
  if (pred.size() != gold.size()) {
    fail(ErrorCode::kInvalidArgument, "prediction and gold lengths differ");
  }
  return std::equal(pred.begin(), pred.end(), gold.begin());
}

}  // namespace ecd::docdecode
