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

#include "shiftacc/calibration.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shiftacc/estimators.hpp"
#include "shiftacc/synth.hpp"
#include "test_util.hpp"

namespace shiftacc {
namespace {

using testing::labels;
using testing::rows;

TEST(Softmax, KnownValues) {
  const auto p = softmax(Eigen::Vector2d(2, 0), 2.0);
  EXPECT_NEAR(p[0], 0.7310585786300049, 1e-15);
  EXPECT_NEAR(p[1], 0.2689414213699951, 1e-15);
  const auto q = softmax(Eigen::Vector3d(3, 1, 0), 1.0);
  EXPECT_NEAR(q[0], 0.8437947344813395, 1e-15);
  EXPECT_NEAR(q[1], 0.11419519938459448, 1e-15);
  EXPECT_NEAR(q[2], 0.04201006613406605, 1e-15);
}

TEST(Softmax, HighTemperatureApproachesUniform) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  Eigen::VectorXd z(6);
  for (Index j = 0; j < 6; ++j) z[j] = u(rng);
  const auto p = softmax(z, 100.0);
  for (Index j = 0; j < 6; ++j) EXPECT_NEAR(p[j], 1.0 / 6, 0.05);
}

TEST(Softmax, ShiftInvariantAndNormalized) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 10);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd z(5);
    for (Index j = 0; j < 5; ++j) z[j] = n(rng);
    const double t = 0.05 + trial * 0.1;
    const auto p = softmax(z, t);
    const auto q = softmax((z.array() + 123.0).matrix(), t);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Softmax, RejectsBadInput) {
  EXPECT_THROW(softmax(Eigen::Vector2d(NAN, 0), 1.0), Error);
  EXPECT_THROW(softmax(Eigen::Vector2d(1, 0), 0.0), Error);
  EXPECT_THROW(softmax(Eigen::Vector2d(1, 0), -1.0), Error);
}

TEST(ApplyTemperature, LogOfScoresRoundTrips) {
  std::mt19937_64 rng(3);
  const auto p = testing::random_scores(rng, 100, 4);
  const auto back = apply_temperature(LogitMatrix<double>::validate(p.values().array().log().matrix()), 1.0);
  EXPECT_LT((back.values() - p.values()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(apply_temperature(LogitMatrix<double>::validate(rows({{2, 0}})), 2.0)(0, 0), 0.7311, 1e-4);
}

TEST(ApplyTemperature, PreservesArgmaxAndShrinksConfidence) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 2);
  RowMatrix<double> z(200, 5);
  for (Index i = 0; i < z.rows(); ++i)
    for (Index j = 0; j < z.cols(); ++j) z(i, j) = n(rng);
  const auto logits = LogitMatrix<double>::validate(z);
  const auto y = testing::random_labels(rng, 200, 5);
  const double base_acc = accuracy(LabeledLogits<double>(logits, y));
  double previous_ac = 1.0;
  for (const double t : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    const auto p = apply_temperature(logits, t);
    for (Index i = 0; i < z.rows(); ++i) EXPECT_EQ(argmax(p.row(i)), argmax(z.row(i)));
    EXPECT_EQ(accuracy(LabeledScores<double>(p, y)), base_acc);
    const double ac = estimate_ac(p).estimate;
    EXPECT_LT(ac, previous_ac);
    previous_ac = ac;
  }
}

TEST(RecoverLogits, SoftmaxReproducesScores) {
  std::mt19937_64 rng(5);
  const auto p = testing::random_scores(rng, 50, 3);
  const auto back = apply_temperature(recover_logits(p), 1.0);
  EXPECT_LT((back.values() - p.values()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GoldenSection, FindsParabolaMinimum) {
  const double x = golden_section_minimize([](double t) { return (t - 1.234) * (t - 1.234); }, 0.0, 5.0, 1e-8);
  EXPECT_NEAR(x, 1.234, 1e-7);
}

TEST(FitTemperature, SingleConfidentSampleHitsLowerBound) {
  const LabeledLogits<double> d(LogitMatrix<double>::validate(rows({{10, 0}})), labels({0}));
  const auto fit = fit_temperature(d);
  EXPECT_NEAR(fit.temperature, kMinTemperature, kTemperatureTolerance);
  EXPECT_FALSE(fit.degenerate);
}

TEST(FitTemperature, ConstantLogitsAreDegenerate) {
  const LabeledLogits<double> d(LogitMatrix<double>::validate(rows({{1, 1, 1}, {-2, -2, -2}})), labels({0, 2}));
  const auto fit = fit_temperature(d);
  EXPECT_TRUE(fit.degenerate);
  EXPECT_EQ(fit.temperature, 1.0);
  EXPECT_NEAR(fit.nll, std::log(3.0), 1e-12);
}

TEST(FitTemperature, RecoversGeneratorTemperature) {
  SynthConfig cfg;
  cfg.k = 4;
  cfg.n_source = 20000;
  cfg.n_target = 1;
  cfg.margin_source = 1.0;
  cfg.noise_source = 1.0;
  cfg.gen_temperature = 2.0;
  cfg.seed = 99;
  const auto data = generate(cfg);
  const auto fit = fit_temperature(data.source);
  // Oracle: scan at 1e-3 then 1e-5 around the coarse minimizer.
  const auto nll = [&](double t) { return mean_nll(data.source, t); };
  double best = 1.0;
  double best_v = nll(best);
  for (double t = 1.0; t <= 4.0; t += 1e-3) {
    if (const double v = nll(t); v < best_v) { best_v = v; best = t; }
  }
  const double coarse = best;
  for (double t = coarse - 2e-3; t <= coarse + 2e-3; t += 1e-5) {
    if (const double v = nll(t); v < best_v) { best_v = v; best = t; }
  }
  EXPECT_NEAR(fit.temperature, best, 1e-3);
  EXPECT_NEAR(fit.temperature, 2.0, 0.05);
  EXPECT_LE(fit.nll, best_v + 1e-9);
}

TEST(FitTemperature, NeverWorseThanGridOrIdentity) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 50 + 30 * trial;
    RowMatrix<double> z(m, 3);
    const double scale = 0.2 + trial;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < 3; ++j) z(i, j) = scale * n(rng);
    const LabeledLogits<double> d(LogitMatrix<double>::validate(z), testing::random_labels(rng, m, 3));
    const auto fit = fit_temperature(d);
    EXPECT_GE(fit.temperature, kMinTemperature);
    EXPECT_LE(fit.temperature, kMaxTemperature);
    EXPECT_LE(fit.nll, mean_nll(d, 1.0) + 1e-9);
    for (const double t : temperature_grid()) EXPECT_LE(fit.nll, mean_nll(d, t) + 1e-6);
  }
}

}  // namespace
}  // namespace shiftacc
