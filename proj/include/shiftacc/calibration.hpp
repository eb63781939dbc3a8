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

#ifndef SHIFTACC_CALIBRATION_HPP
#define SHIFTACC_CALIBRATION_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "shiftacc/core.hpp"

namespace shiftacc {

inline constexpr double kMinTemperature = 0.01;
inline constexpr double kMaxTemperature = 100.0;
inline constexpr int kTemperatureGridPoints = 200;
inline constexpr double kTemperatureTolerance = 1e-4;
/// Floor added before taking logs when logits must be recovered from probabilities.
inline constexpr double kLogRecoveryEpsilon = 1e-12;

struct TemperatureFit {
  double temperature = 1.0;
  /// Mean per-sample negative log-likelihood at `temperature`.
  double nll = 0.0;
  /// Winner of the coarse grid stage.
  double grid_best = 1.0;
  /// Every row had constant logits; NLL does not depend on T.
  bool degenerate = false;
};

namespace detail {

inline void check_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidConfig, "temperature must be positive and finite");
  }
}

/// log sum_k exp((z_k - z_max) / T), row-wise.
template <typename Derived>
double shifted_log_sum_exp(const Eigen::MatrixBase<Derived>& row, double zmax, double t) {
  double s = 0.0;
  for (Index k = 0; k < row.size(); ++k) s += std::exp((static_cast<double>(row(k)) - zmax) / t);
  return std::log(s);
}

}  // namespace detail

/// Tempered softmax of one logit row, computed relative to the row maximum.
template <typename Derived>
Vector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits, double temperature) {
  using Scalar = typename Derived::Scalar;
  detail::check_temperature(temperature);
  double zmax = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < logits.size(); ++k) {
    const double z = static_cast<double>(logits(k));
    if (!std::isfinite(z)) throw Error(ErrorCode::kNonFiniteValue, "non-finite logit");
    zmax = std::max(zmax, z);
  }
  std::vector<double> e(static_cast<std::size_t>(logits.size()));
  double sum = 0.0;
  for (Index k = 0; k < logits.size(); ++k) {
    e[static_cast<std::size_t>(k)] = std::exp((static_cast<double>(logits(k)) - zmax) / temperature);
    sum += e[static_cast<std::size_t>(k)];
  }
  Vector<Scalar> p(logits.size());
  for (Index k = 0; k < logits.size(); ++k) p[k] = static_cast<Scalar>(e[static_cast<std::size_t>(k)] / sum);
  return p;
}

template <typename Scalar>
ScoreMatrix<Scalar> apply_temperature(const LogitMatrix<Scalar>& logits, double temperature) {
  RowMatrix<Scalar> p(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) p.row(i) = softmax(logits.row(i), temperature).transpose();
  return ScoreMatrix<Scalar>::validate(std::move(p));
}

/// log(p + 1e-12) entry-wise, for probability-only inputs.
template <typename Scalar>
LogitMatrix<Scalar> recover_logits(const ScoreMatrix<Scalar>& scores) {
  RowMatrix<Scalar> z(scores.rows(), scores.cols());
  for (Index i = 0; i < scores.rows(); ++i) {
    for (Index j = 0; j < scores.cols(); ++j) {
      z(i, j) = static_cast<Scalar>(std::log(static_cast<double>(scores(i, j)) + kLogRecoveryEpsilon));
    }
  }
  return LogitMatrix<Scalar>::validate(std::move(z));
}

/// Mean of -log softmax(z_i / T)[y_i].
template <typename Scalar>
double mean_nll(const LabeledLogits<Scalar>& data, double temperature) {
  detail::check_temperature(temperature);
  const auto& z = data.scores().values();
  double total = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    const double zmax = static_cast<double>(z.row(i).maxCoeff());
    const double zy = static_cast<double>(z(i, data.labels()[i]));
    total += detail::shifted_log_sum_exp(z.row(i), zmax, temperature) - (zy - zmax) / temperature;
  }
  return total / static_cast<double>(z.rows());
}

/// Golden-section search for a minimum of a unimodal f on [lo, hi]; stops
/// once the bracket is narrower than `tolerance`. Returns the best point
/// evaluated.
inline double golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tolerance) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

/// Log-spaced temperatures spanning [kMinTemperature, kMaxTemperature].
inline std::vector<double> temperature_grid() {
  std::vector<double> g(kTemperatureGridPoints);
  const double lo = std::log10(kMinTemperature);
  const double hi = std::log10(kMaxTemperature);
  for (int i = 0; i < kTemperatureGridPoints; ++i) {
    g[static_cast<std::size_t>(i)] = std::pow(10.0, lo + (hi - lo) * i / (kTemperatureGridPoints - 1));
  }
  g.front() = kMinTemperature;
  g.back() = kMaxTemperature;
  return g;
}

/// Fits T in [0.01, 100] minimizing mean NLL: a 200-point log grid picks the
/// bracket, golden-section search refines it to 1e-4 in T.
template <typename Scalar>
TemperatureFit fit_temperature(const LabeledLogits<Scalar>& source) {
  const auto& z = source.scores().values();
  bool constant_rows = true;
  for (Index i = 0; i < z.rows() && constant_rows; ++i) {
    constant_rows = z.row(i).maxCoeff() == z.row(i).minCoeff();
  }
  if (constant_rows) {
    return {1.0, mean_nll(source, 1.0), 1.0, true};
  }

  const auto nll = [&](double t) { return mean_nll(source, t); };
  const std::vector<double> grid = temperature_grid();
  std::size_t best = 0;
  double best_nll = nll(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = nll(grid[i]);
    if (v < best_nll) {
      best_nll = v;
      best = i;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];

  TemperatureFit fit;
  fit.grid_best = grid[best];
  fit.temperature = grid[best];
  fit.nll = best_nll;
  std::vector<double> candidates = {golden_section_minimize(nll, lo, hi, kTemperatureTolerance), lo, hi};
  if (lo < 1.0 && 1.0 < hi) candidates.push_back(1.0);
  for (const double t : candidates) {
    const double v = nll(t);
    if (v < fit.nll) {
      fit.nll = v;
      fit.temperature = t;
    }
  }
  return fit;
}

}  // namespace shiftacc

#endif  // SHIFTACC_CALIBRATION_HPP
