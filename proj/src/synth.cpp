// Copyright 2026 The shiftacc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shiftacc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shiftacc/rng.hpp"

namespace shiftacc {
namespace {

constexpr std::uint32_t kSourceTag = 0;
constexpr std::uint32_t kTargetTag = 1;

void check_prior(const std::vector<double>& prior, int k, const char* name) {
  if (prior.empty()) return;
  if (static_cast<int>(prior.size()) != k) {
    throw Error(ErrorCode::kInvalidConfig, std::string(name) + " must have k entries");
  }
  double sum = 0.0;
  for (const double p : prior) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kInvalidConfig, std::string(name) + " has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidConfig, std::string(name) + " does not sum to 1");
  }
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidConfig, std::string(name) + " must be positive and finite");
  }
}

struct Side {
  Index n;
  const std::vector<double>* prior;
  double margin;
  double noise;
  double label_noise;
  std::uint32_t tag;
};

LabeledLogits<double> draw(const SynthConfig& cfg, const Side& side) {
  const int k = cfg.k;
  std::vector<double> cdf(static_cast<std::size_t>(k));
  double acc = 0.0;
  for (int j = 0; j < k; ++j) {
    acc += side.prior->empty() ? 1.0 / k : (*side.prior)[static_cast<std::size_t>(j)];
    cdf[static_cast<std::size_t>(j)] = acc;
  }

  RowMatrix<double> logits(side.n, k);
  Labels labels(side.n);
  for (Index i = 0; i < side.n; ++i) {
    CounterStream stream(cfg.seed, side.tag, static_cast<std::uint64_t>(i));
    const double u = stream.uniform() * acc;
    int y = 0;
    while (y < k - 1 && u >= cdf[static_cast<std::size_t>(y)]) ++y;
    for (int j = 0; j < k; ++j) {
      const double z = (j == y ? side.margin : 0.0) + side.noise * stream.normal();
      logits(i, j) = z * cfg.gen_temperature;
    }
    const double u_flip = stream.uniform();
    const double u_other = stream.uniform();
    if (u_flip < side.label_noise) {
      int other = std::min(static_cast<int>(u_other * (k - 1)), k - 2);
      if (other >= y) ++other;
      y = other;
    }
    labels[i] = y;
  }
  return {LogitMatrix<double>::validate(std::move(logits)), std::move(labels)};
}

}  // namespace

void SynthConfig::validate() const {
  if (k < 2) throw Error(ErrorCode::kInvalidConfig, "k must be at least 2");
  if (n_source < 1) throw Error(ErrorCode::kInvalidConfig, "n_source must be at least 1");
  if (n_target < 1) throw Error(ErrorCode::kInvalidConfig, "n_target must be at least 1");
  check_prior(prior_source, k, "prior_source");
  check_prior(prior_target, k, "prior_target");
  if (!std::isfinite(margin_source) || !std::isfinite(margin_target)) {
    throw Error(ErrorCode::kInvalidConfig, "margins must be finite");
  }
  check_positive(noise_source, "noise_source");
  check_positive(noise_target, "noise_target");
  check_positive(gen_temperature, "gen_temperature");
  for (const double r : {label_noise_source, label_noise_target}) {
    if (!(r >= 0.0 && r <= 0.5)) {
      throw Error(ErrorCode::kInvalidConfig, "label noise must lie in [0, 0.5]");
    }
  }
}

SynthConfig SynthConfig::without_shift() const {
  SynthConfig out = *this;
  out.n_target = n_target;
  out.prior_target = prior_source;
  out.margin_target = margin_source;
  out.noise_target = noise_source;
  out.label_noise_target = label_noise_source;
  return out;
}

SynthOutput generate(const SynthConfig& cfg) {
  cfg.validate();
  auto source = draw(cfg, {cfg.n_source, &cfg.prior_source, cfg.margin_source, cfg.noise_source,
                           cfg.label_noise_source, kSourceTag});
  auto target = draw(cfg, {cfg.n_target, &cfg.prior_target, cfg.margin_target, cfg.noise_target,
                           cfg.label_noise_target, kTargetTag});
  const double acc_s = accuracy(source);
  const double acc_t = accuracy(target);
  return {std::move(source), std::move(target), acc_s, acc_t};
}

}  // namespace shiftacc
