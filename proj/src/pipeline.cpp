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

#include "shiftacc/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "shiftacc/calibration.hpp"
#include "shiftacc/rng.hpp"

namespace shiftacc {
namespace {

constexpr std::uint32_t kSplitTag = 2;

bool needs_source_labels(Method m) {
  return m == Method::kAtcMc || m == Method::kAtcNe || m == Method::kDoc || m == Method::kCpcAcc;
}

std::vector<Method> normalized(std::vector<Method> methods) {
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  return methods;
}

LogitMatrix<double> as_logits(const PredictionData& d) {
  if (d.kind == ScoreKind::kLogits) return d.logits();
  return recover_logits(d.scores());
}

ScoreMatrix<double> as_scores(const PredictionData& d) {
  if (d.kind == ScoreKind::kProbabilities) return d.scores();
  return apply_temperature(d.logits(), 1.0);
}

}  // namespace

PredictionData to_prediction_data(const LabeledLogits<double>& data) {
  return {ScoreKind::kLogits, data.scores().values(), data.labels()};
}

EvaluationReport run_estimate(const PredictionData& source, const PredictionData& target,
                              const EstimateOptions& opts) {
  if (source.classes() != target.classes()) {
    throw Error(ErrorCode::kClassCountMismatch,
                "source has " + std::to_string(source.classes()) + " classes, target has " +
                    std::to_string(target.classes()));
  }
  const std::vector<Method> methods = normalized(opts.methods);
  if (methods.empty()) throw Error(ErrorCode::kInvalidConfig, "no estimation method selected");
  if (!(opts.cal_fraction > 0.0 && opts.cal_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "cal-fraction must lie in (0, 1]");
  }
  const bool labels_needed =
      opts.temperature_scale || std::any_of(methods.begin(), methods.end(), needs_source_labels);
  if (labels_needed && !source.has_labels()) {
    throw Error(ErrorCode::kMissingLabels, "source file has no label column");
  }

  const Index m = source.rows();
  std::vector<Index> cal_rows(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) cal_rows[static_cast<std::size_t>(i)] = i;
  std::vector<Index> acc_rows = cal_rows;
  if (opts.cal_fraction < 1.0) {
    if (m < 2) throw Error(ErrorCode::kInvalidConfig, "cal-fraction below 1 needs at least 2 source rows");
    const auto perm = permutation(m, opts.seed, kSplitTag);
    const auto n_cal = std::clamp<Index>(
        static_cast<Index>(std::nearbyint(opts.cal_fraction * static_cast<double>(m))), 1, m - 1);
    cal_rows.assign(perm.begin(), perm.begin() + n_cal);
    acc_rows.assign(perm.begin() + n_cal, perm.end());
    std::sort(cal_rows.begin(), cal_rows.end());
    std::sort(acc_rows.begin(), acc_rows.end());
  }

  EvaluationReport report;
  report.meta.seed = opts.seed;
  report.meta.cal_fraction = opts.cal_fraction;
  report.meta.doc_signed = opts.doc_signed;
  report.meta.source_rows = m;
  report.meta.target_rows = target.rows();
  report.meta.classes = source.classes();

  std::optional<ScoreMatrix<double>> src;
  std::optional<ScoreMatrix<double>> tgt;
  if (opts.temperature_scale) {
    const LogitMatrix<double> src_logits = as_logits(source);
    const LabeledLogits<double> fit_set(
        LogitMatrix<double>::validate(take_rows(src_logits.values(), cal_rows)),
        take_labels(*source.labels, cal_rows));
    const TemperatureFit fit = fit_temperature(fit_set);
    if (fit.degenerate) {
      report.meta.warnings.push_back("constant logits in every source row; temperature left at 1");
    }
    report.meta.temperature = fit.temperature;
    src = apply_temperature(src_logits, fit.temperature);
    tgt = apply_temperature(as_logits(target), fit.temperature);
  } else {
    src = as_scores(source);
    tgt = as_scores(target);
  }

  const ScoreMatrix<double> calibration =
      ScoreMatrix<double>::validate(take_rows(src->values(), cal_rows));
  std::optional<LabeledScores<double>> labeled;
  if (source.has_labels()) {
    labeled.emplace(ScoreMatrix<double>::validate(take_rows(src->values(), acc_rows)),
                    take_labels(*source.labels, acc_rows));
  }

  if (target.has_labels()) {
    report.true_target_accuracy = accuracy(LabeledScores<double>(*tgt, *target.labels));
  }

  for (const Method method : methods) {
    EstimatorOutput out;
    switch (method) {
      case Method::kAtcMc:
        out = estimate_atc(*labeled, *tgt, {AtcScore::kMaxConfidence});
        break;
      case Method::kAtcNe:
        out = estimate_atc(*labeled, *tgt, {AtcScore::kNegEntropy});
        break;
      case Method::kAc:
        out = estimate_ac(*tgt);
        break;
      case Method::kDoc:
        out = estimate_doc(*labeled, *tgt, {opts.doc_signed});
        if (out.clamped) report.meta.warnings.push_back("DOC estimate clamped to [0, 1]");
        break;
      case Method::kCpcAcc: {
        const double acc = accuracy(*labeled);
        out = conformal_confidence(calibration, *tgt, acc, Method::kCpcAcc);
        out.source_accuracy = acc;
        break;
      }
      case Method::kCpcAc:
        out = conformal_confidence(calibration, *tgt, estimate_ac(*tgt).estimate, Method::kCpcAc);
        break;
    }
    out.temperature = report.meta.temperature;
    report.meta.empty_set_fallbacks += out.empty_set_fallbacks;
    MethodResult result{out, std::nullopt};
    if (report.true_target_accuracy) {
      result.absolute_error = std::abs(out.estimate - *report.true_target_accuracy);
    }
    report.results.push_back(std::move(result));
  }
  return report;
}

AggregateReport run_synth_evaluation(const SynthConfig& cfg, int runs, const EstimateOptions& opts) {
  if (runs < 1) throw Error(ErrorCode::kInvalidConfig, "runs must be at least 1");
  AggregateReport agg;
  agg.runs = runs;
  agg.base_seed = cfg.seed;
  agg.temperature_scaled = opts.temperature_scale;
  double src_total = 0.0;
  double tgt_total = 0.0;
  for (int r = 0; r < runs; ++r) {
    SynthConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
    const SynthOutput data = generate(run_cfg);
    src_total += data.true_source_accuracy;
    tgt_total += data.true_target_accuracy;
    agg.per_run.push_back(
        run_estimate(to_prediction_data(data.source), to_prediction_data(data.target), opts));
  }
  agg.mean_true_source_accuracy = src_total / runs;
  agg.mean_true_target_accuracy = tgt_total / runs;

  const std::size_t n_methods = agg.per_run.front().results.size();
  for (std::size_t j = 0; j < n_methods; ++j) {
    MethodSummary s;
    s.method = agg.per_run.front().results[j].output.method;
    double est = 0.0;
    double err = 0.0;
    for (const auto& run : agg.per_run) {
      est += run.results[j].output.estimate;
      err += *run.results[j].absolute_error;
    }
    s.mean_estimate = est / runs;
    s.mean_absolute_error = err / runs;
    if (runs > 1) {
      double ss = 0.0;
      for (const auto& run : agg.per_run) {
        const double d = *run.results[j].absolute_error - s.mean_absolute_error;
        ss += d * d;
      }
      s.std_absolute_error = std::sqrt(ss / (runs - 1));
    }
    agg.methods.push_back(s);
  }
  return agg;
}

}  // namespace shiftacc
