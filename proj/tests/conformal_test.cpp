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

#include "shiftacc/conformal.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

namespace shiftacc {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) out[i++] = x;
  return out;
}

TEST(Quantile, OrderStatistics) {
  const auto s = vec({0.9, 0.5, 0.7, 0.6, 0.8});
  EXPECT_EQ(quantile(s, 1.0), 0.9);
  // ceil(0.4 * 5) = 2 -> second smallest.
  EXPECT_EQ(quantile(s, 0.4), 0.6);
  EXPECT_EQ(quantile(s, 0.0), 0.5);
  EXPECT_EQ(quantile(s, 7.0), 0.9);
  EXPECT_EQ(quantile(vec({0.3}), 0.0), 0.3);
  EXPECT_EQ(quantile(vec({0.3}), 0.5), 0.3);
  EXPECT_EQ(quantile(vec({0.3}), 2.0), 0.3);
}

TEST(Quantile, EmptyInputThrows) {
  try {
    quantile(Eigen::VectorXd(0), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Quantile, LevelsOfFormCOverMAreExact) {
  // c/m * m is not always exactly c in binary; the rank must still be c.
  for (Index m = 1; m <= 300; ++m) {
    for (Index c = 1; c <= m; ++c) {
      ASSERT_EQ(quantile_rank(m, static_cast<double>(c) / static_cast<double>(m)), c)
          << "m=" << m << " c=" << c;
    }
  }
}

TEST(Quantile, MemberOfInputAndMonotoneInLevel) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index m = 1 + trial % 40;
    Eigen::VectorXd s(m);
    for (Index i = 0; i < m; ++i) s[i] = std::round(u(rng) * 10) / 10;  // duplicates on purpose
    double q1 = u(rng) * 1.2;
    double q2 = u(rng) * 1.2;
    if (q1 > q2) std::swap(q1, q2);
    const double a = quantile(s, q1);
    const double b = quantile(s, q2);
    EXPECT_LE(a, b);
    EXPECT_TRUE((s.array() == a).any());
    // At least min(q, 1) of the scores are <= the result.
    const double frac = static_cast<double>((s.array() <= b).count()) / static_cast<double>(m);
    EXPECT_GE(frac + 1e-12, std::min(q2, 1.0));
  }
}

TEST(ConformalThreshold, HandEvaluation) {
  const auto s = vec({0.5, 0.6, 0.7, 0.8, 0.9});
  // alpha = 0.8: q = ceil(4.8) / 5 = 1.0.
  auto cal = conformal_threshold(s, 0.8);
  EXPECT_EQ(cal.t_hat, 0.9);
  EXPECT_EQ(cal.quantile_index, 5);
  EXPECT_EQ(cal.m, 5);
  EXPECT_EQ(cal.alpha, 0.8);
  // alpha = 0.5: ceil(3) / 5 -> third smallest.
  EXPECT_EQ(conformal_threshold(s, 0.5).t_hat, 0.7);
  // alpha = 0 clamps to the minimum, alpha = 1 to the maximum.
  EXPECT_EQ(conformal_threshold(s, 0.0).t_hat, 0.5);
  EXPECT_EQ(conformal_threshold(s, 0.0).quantile_index, 1);
  EXPECT_EQ(conformal_threshold(s, 1.0).t_hat, 0.9);
}

TEST(ConformalThreshold, RejectsBadAlphaAndEmptySet) {
  EXPECT_THROW(conformal_threshold(vec({0.5}), 1.5), Error);
  EXPECT_THROW(conformal_threshold(vec({0.5}), -0.1), Error);
  EXPECT_THROW(conformal_threshold(Eigen::VectorXd(0), 0.5), Error);
}

TEST(ConformalThreshold, PermutationInvariant) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd s(57);
  for (Index i = 0; i < s.size(); ++i) s[i] = u(rng);
  Eigen::VectorXd shuffled = s;
  std::shuffle(shuffled.data(), shuffled.data() + shuffled.size(), rng);
  for (const double alpha : {0.0, 0.1, 0.33, 0.5, 0.9, 0.99, 1.0}) {
    EXPECT_EQ(conformal_threshold(s, alpha).t_hat, conformal_threshold(shuffled, alpha).t_hat);
  }
}

TEST(PredictionSet, StrictInequality) {
  const auto row = vec({0.5, 0.3, 0.2});
  EXPECT_EQ(prediction_set(row, 0.25), (std::vector<Index>{0, 1}));
  EXPECT_TRUE(prediction_set(row, 0.5).empty());
  EXPECT_EQ(prediction_set(row, 0.0), (std::vector<Index>{0, 1, 2}));
}

TEST(PredictionSet, SizeMonotoneInThreshold) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd row(8);
  for (Index j = 0; j < 8; ++j) row[j] = u(rng);
  row /= row.sum();
  std::size_t previous = 9;
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    const std::size_t n = prediction_set(row, t).size();
    EXPECT_LE(n, previous);
    previous = n;
  }
}

}  // namespace
}  // namespace shiftacc
