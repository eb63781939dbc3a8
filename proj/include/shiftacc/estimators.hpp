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

#ifndef SHIFTACC_ESTIMATORS_HPP
#define SHIFTACC_ESTIMATORS_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shiftacc/conformal.hpp"
#include "shiftacc/core.hpp"

namespace shiftacc {

/// Declaration order is the report row order.
enum class Method { kAtcMc, kAtcNe, kAc, kDoc, kCpcAcc, kCpcAc };

inline constexpr std::array<Method, 6> kAllMethods = {
    Method::kAtcMc, Method::kAtcNe, Method::kAc, Method::kDoc, Method::kCpcAcc, Method::kCpcAc};

constexpr std::string_view method_name(Method m) {
  switch (m) {
    case Method::kAtcMc: return "ATC-MC";
    case Method::kAtcNe: return "ATC-NE";
    case Method::kAc: return "AC";
    case Method::kDoc: return "DOC";
    case Method::kCpcAcc: return "CPC-ACC";
    case Method::kCpcAc: return "CPC-AC";
  }
  return "?";
}

/// Case-insensitive; accepts "ATC-MC", "atc_mc", "atcmc" and so on.
inline std::optional<Method> parse_method(std::string_view name) {
  std::string key;
  for (const char c : name) {
    if (c == '-' || c == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "atcmc") return Method::kAtcMc;
  if (key == "atcne") return Method::kAtcNe;
  if (key == "ac") return Method::kAc;
  if (key == "doc") return Method::kDoc;
  if (key == "cpcacc") return Method::kCpcAcc;
  if (key == "cpcac") return Method::kCpcAc;
  return std::nullopt;
}

struct EstimatorOutput {
  Method method = Method::kAc;
  double estimate = 0.0;
  /// ATC threshold t (may be -inf) or conformal t_hat.
  std::optional<double> threshold;
  std::optional<double> alpha;
  std::optional<double> temperature;
  std::optional<double> source_accuracy;
  /// Raw DOC value fell outside [0, 1] and was clamped.
  bool clamped = false;
  /// Target rows whose conformal set was empty and fell back to {argmax}.
  Index empty_set_fallbacks = 0;
};

enum class AtcScore { kMaxConfidence, kNegEntropy };

struct AtcConfig {
  AtcScore score_fn = AtcScore::kMaxConfidence;
};

struct DocConfig {
  /// false adds |AC_T - AC_S|; true adds the signed difference.
  bool signed_difference = false;
};

enum class CpcVariant { kSourceAccuracy, kAverageConfidence };

namespace detail {

template <typename Scalar>
void require_same_classes(const ScoreMatrix<Scalar>& a, const ScoreMatrix<Scalar>& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::kClassCountMismatch,
                "source has " + std::to_string(a.cols()) + " classes, target has " +
                    std::to_string(b.cols()));
  }
}

template <typename Scalar>
Vector<Scalar> atc_scores(const ScoreMatrix<Scalar>& s, AtcScore fn) {
  return fn == AtcScore::kMaxConfidence ? max_confidence(s) : neg_entropy(s);
}

}  // namespace detail

template <typename Scalar>
EstimatorOutput estimate_ac(const ScoreMatrix<Scalar>& target) {
  EstimatorOutput out;
  out.method = Method::kAc;
  out.estimate = sequential_mean(max_confidence(target));
  return out;
}

template <typename Scalar>
EstimatorOutput estimate_doc(const LabeledScores<Scalar>& source,
                             const ScoreMatrix<Scalar>& target, const DocConfig& cfg = {}) {
  detail::require_same_classes(source.scores(), target);
  const double acc = accuracy(source);
  const double gap = sequential_mean(max_confidence(target)) -
                     sequential_mean(max_confidence(source.scores()));
  const double raw = acc + (cfg.signed_difference ? gap : std::abs(gap));
  EstimatorOutput out;
  out.method = Method::kDoc;
  out.estimate = std::clamp(raw, 0.0, 1.0);
  out.clamped = out.estimate != raw;
  out.source_accuracy = acc;
  return out;
}

/// Threshold t such that round(a * m) source scores lie strictly above it
/// (exactly so when scores are distinct). Returns -inf when a rounds to 1.
/// Rounding is half-to-even.
template <typename Scalar>
double select_atc_threshold(const LabeledScores<Scalar>& source, const AtcConfig& cfg = {}) {
  const Index m = source.size();
  const double a = accuracy(source);
  const Vector<Scalar> s = detail::atc_scores(source.scores(), cfg.score_fn);
  std::vector<Scalar> sorted(s.data(), s.data() + s.size());
  std::sort(sorted.begin(), sorted.end());
  const Index above = static_cast<Index>(std::nearbyint(a * static_cast<double>(m)));
  const Index k = m - above;
  if (k <= 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(sorted[static_cast<std::size_t>(std::min(k, m) - 1)]);
}

template <typename Scalar>
EstimatorOutput estimate_atc(const LabeledScores<Scalar>& source,
                             const ScoreMatrix<Scalar>& target, const AtcConfig& cfg = {}) {
  detail::require_same_classes(source.scores(), target);
  const double t = select_atc_threshold(source, cfg);
  const Vector<Scalar> s = detail::atc_scores(target, cfg.score_fn);
  Index above = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (static_cast<double>(s[i]) > t) ++above;
  }
  EstimatorOutput out;
  out.method = cfg.score_fn == AtcScore::kMaxConfidence ? Method::kAtcMc : Method::kAtcNe;
  out.estimate = static_cast<double>(above) / static_cast<double>(s.size());
  out.threshold = t;
  out.source_accuracy = accuracy(source);
  return out;
}

/// Mean score inside the prediction set {j : p_j > t_hat} of one row. An
/// empty set falls back to {argmax}; `fell_back` reports that.
template <typename Derived>
double set_confidence(const Eigen::DenseBase<Derived>& row, typename Derived::Scalar t_hat,
                      bool* fell_back = nullptr) {
  std::vector<Index> set = prediction_set(row, t_hat);
  if (fell_back) *fell_back = set.empty();
  if (set.empty()) set.push_back(argmax(row));
  double inside = 0.0;
  for (const Index j : set) inside += static_cast<double>(row(j));
  return inside / static_cast<double>(set.size());
}

/// Conformal prediction confidence at level alpha: t_hat is calibrated on the
/// max scores of `calibration`; the estimate is the target mean of
/// set_confidence.
template <typename Scalar>
EstimatorOutput conformal_confidence(const ScoreMatrix<Scalar>& calibration,
                                     const ScoreMatrix<Scalar>& target, double alpha,
                                     Method tag) {
  detail::require_same_classes(calibration, target);
  const auto cal = conformal_threshold(max_confidence(calibration), alpha);
  EstimatorOutput out;
  out.method = tag;
  double total = 0.0;
  for (Index i = 0; i < target.rows(); ++i) {
    bool fell_back = false;
    total += set_confidence(target.row(i), cal.t_hat, &fell_back);
    if (fell_back) ++out.empty_set_fallbacks;
  }
  out.estimate = std::clamp(total / static_cast<double>(target.rows()), 0.0, 1.0);
  out.threshold = static_cast<double>(cal.t_hat);
  out.alpha = alpha;
  return out;
}

/// CPC-ACC: alpha is the source accuracy, calibration on the source rows.
template <typename Scalar>
EstimatorOutput estimate_cpc_acc(const LabeledScores<Scalar>& source,
                                 const ScoreMatrix<Scalar>& target) {
  const double acc = accuracy(source);
  EstimatorOutput out = conformal_confidence(source.scores(), target, acc, Method::kCpcAcc);
  out.source_accuracy = acc;
  return out;
}

/// CPC-AC: alpha is the target average confidence. Needs no labels.
template <typename Scalar>
EstimatorOutput estimate_cpc_ac(const ScoreMatrix<Scalar>& source,
                                const ScoreMatrix<Scalar>& target) {
  const double alpha = std::clamp(estimate_ac(target).estimate, 0.0, 1.0);
  return conformal_confidence(source, target, alpha, Method::kCpcAc);
}

template <typename Scalar>
EstimatorOutput estimate_cpc(const LabeledScores<Scalar>& source,
                             const ScoreMatrix<Scalar>& target, CpcVariant variant) {
  if (variant == CpcVariant::kSourceAccuracy) return estimate_cpc_acc(source, target);
  return estimate_cpc_ac(source.scores(), target);
}

}  // namespace shiftacc

#endif  // SHIFTACC_ESTIMATORS_HPP
