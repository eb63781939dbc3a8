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

#ifndef SHIFTACC_PIPELINE_HPP
#define SHIFTACC_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shiftacc/estimators.hpp"
#include "shiftacc/io.hpp"
#include "shiftacc/synth.hpp"

namespace shiftacc {

struct EstimateOptions {
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  bool temperature_scale = false;
  bool doc_signed = false;
  /// Share of the labeled source rows used for conformal calibration and
  /// temperature fitting; the rest estimate source accuracy. 1.0 uses every
  /// row for both.
  double cal_fraction = 1.0;
  /// Seeds the calibration split.
  std::uint64_t seed = 0;
};

struct MethodResult {
  EstimatorOutput output;
  /// |estimate - true target accuracy|, when the target carries labels.
  std::optional<double> absolute_error;
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::optional<double> temperature;
  double cal_fraction = 1.0;
  bool doc_signed = false;
  Index empty_set_fallbacks = 0;
  Index source_rows = 0;
  Index target_rows = 0;
  Index classes = 0;
  std::vector<std::string> warnings;
};

struct EvaluationReport {
  std::vector<MethodResult> results;
  std::optional<double> true_target_accuracy;
  RunMetadata meta;
};

/// Optional temperature fit on the source, applied to both sides, then each
/// requested method in report order. Target labels, when present, are used
/// only to score the estimates.
EvaluationReport run_estimate(const PredictionData& source, const PredictionData& target,
                              const EstimateOptions& opts = {});

struct MethodSummary {
  Method method = Method::kAc;
  double mean_estimate = 0.0;
  double mean_absolute_error = 0.0;
  /// Sample standard deviation (n - 1); zero for a single run.
  double std_absolute_error = 0.0;
};

struct AggregateReport {
  int runs = 0;
  std::uint64_t base_seed = 0;
  bool temperature_scaled = false;
  double mean_true_source_accuracy = 0.0;
  double mean_true_target_accuracy = 0.0;
  std::vector<MethodSummary> methods;
  std::vector<EvaluationReport> per_run;
};

/// Repeats generate + run_estimate with synth seeds base, base + 1, ...
AggregateReport run_synth_evaluation(const SynthConfig& cfg, int runs,
                                     const EstimateOptions& opts = {});

PredictionData to_prediction_data(const LabeledLogits<double>& data);

}  // namespace shiftacc

#endif  // SHIFTACC_PIPELINE_HPP
