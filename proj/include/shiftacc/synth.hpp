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

#ifndef SHIFTACC_SYNTH_HPP
#define SHIFTACC_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "shiftacc/core.hpp"

namespace shiftacc {

/// Gaussian-logit generator for a labeled source and a shifted target.
///
/// Per sample: y ~ prior; z_j = margin * [j == y] + noise * N(0, 1); with
/// probability label_noise the label is replaced by a uniformly chosen other
/// class (logits untouched); the emitted logits are gen_temperature * z.
///
/// With a uniform prior the Bayes posterior is softmax(z * margin / noise^2),
/// so z is calibrated at T = 1 exactly when margin == noise^2. The emitted
/// logits are then calibrated at T = gen_temperature, which is what
/// temperature scaling recovers. In general the recovered factor is
/// gen_temperature * noise^2 / margin.
struct SynthConfig {
  int k = 3;
  Index n_source = 5000;
  Index n_target = 5000;
  /// Empty means uniform.
  std::vector<double> prior_source;
  std::vector<double> prior_target;
  double margin_source = 1.0;
  double margin_target = 1.0;
  double noise_source = 1.0;
  double noise_target = 1.5;
  double label_noise_source = 0.0;
  double label_noise_target = 0.0;
  double gen_temperature = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig on the first violated bound.
  void validate() const;
  /// Target drawn from exactly the source distribution.
  SynthConfig without_shift() const;
};

struct SynthOutput {
  LabeledLogits<double> source;
  LabeledLogits<double> target;
  double true_source_accuracy;
  double true_target_accuracy;
};

SynthOutput generate(const SynthConfig& cfg);

}  // namespace shiftacc

#endif  // SHIFTACC_SYNTH_HPP
