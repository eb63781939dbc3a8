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

#ifndef SHIFTACC_CONFORMAL_HPP
#define SHIFTACC_CONFORMAL_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shiftacc/core.hpp"

namespace shiftacc {

/// Split-conformal threshold on a calibration score multiset.
template <typename Scalar>
struct ConformalCalibration {
  Scalar t_hat;
  double alpha;
  Index m;
  /// 1-based order statistic that produced t_hat.
  Index quantile_index;
};

namespace detail {

/// ceil(x), except that values within a few ulps of an integer snap to it.
/// Levels such as c/m re-multiplied by m are not exact in binary and would
/// otherwise jump to the next order statistic.
inline double ceil_snapped(double x) {
  const double r = std::nearbyint(x);
  if (std::abs(x - r) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
    return r;
  }
  return std::ceil(x);
}

}  // namespace detail

/// 1-based rank clamp(ceil(q * m), 1, m).
inline Index quantile_rank(Index m, double q) {
  const double k = detail::ceil_snapped(q * static_cast<double>(m));
  if (!(k >= 1.0)) return 1;
  if (k >= static_cast<double>(m)) return m;
  return static_cast<Index>(k);
}

template <typename Scalar>
Scalar quantile(std::span<const Scalar> scores, double q) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "quantile of an empty set");
  if (!std::isfinite(q) || q < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "quantile level must be finite and >= 0");
  }
  std::vector<Scalar> sorted(scores.begin(), scores.end());
  for (const Scalar s : sorted) {
    if (!std::isfinite(static_cast<double>(s))) {
      throw Error(ErrorCode::kNonFiniteValue, "non-finite calibration score");
    }
  }
  const Index k = quantile_rank(static_cast<Index>(sorted.size()), q);
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  return sorted[static_cast<std::size_t>(k - 1)];
}

template <typename Derived>
typename Derived::Scalar quantile(const Eigen::DenseBase<Derived>& scores, double q) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> copy = scores;
  return quantile(std::span<const Scalar>(copy.data(), static_cast<std::size_t>(copy.size())), q);
}

/// t_hat = Q(scores, ceil(alpha * (m + 1)) / m). Levels above 1 select the
/// largest score.
template <typename Derived>
ConformalCalibration<typename Derived::Scalar> conformal_threshold(
    const Eigen::DenseBase<Derived>& calibration_scores, double alpha) {
  const Index m = calibration_scores.size();
  if (m < 1) throw Error(ErrorCode::kEmptyInput, "empty calibration set");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  const double md = static_cast<double>(m);
  const double q = detail::ceil_snapped(alpha * (md + 1.0)) / md;
  return {quantile(calibration_scores, q), alpha, m, quantile_rank(m, q)};
}

/// Classes scoring strictly above t_hat, ascending. May be empty.
template <typename Derived>
std::vector<Index> prediction_set(const Eigen::DenseBase<Derived>& row,
                                  typename Derived::Scalar t_hat) {
  std::vector<Index> out;
  for (Index j = 0; j < row.size(); ++j) {
    if (row(j) > t_hat) out.push_back(j);
  }
  return out;
}

}  // namespace shiftacc

#endif  // SHIFTACC_CONFORMAL_HPP
