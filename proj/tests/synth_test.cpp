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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "shiftacc/rng.hpp"

namespace shiftacc {
namespace {

TEST(Philox, KnownAnswerVectors) {
  using W = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterStream, UniformAndNormalMoments) {
  double u_sum = 0.0;
  double n_sum = 0.0;
  double n_sq = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    CounterStream s(42, 0, static_cast<std::uint64_t>(i));
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    u_sum += u;
    const double z = s.normal();
    n_sum += z;
    n_sq += z * z;
  }
  EXPECT_NEAR(u_sum / draws, 0.5, 0.005);
  EXPECT_NEAR(n_sum / draws, 0.0, 0.01);
  EXPECT_NEAR(n_sq / draws, 1.0, 0.01);
}

TEST(Permutation, DeterministicAndComplete) {
  const auto p = permutation(1000, 5, 2);
  EXPECT_EQ(p, permutation(1000, 5, 2));
  EXPECT_NE(p, permutation(1000, 6, 2));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (Index i = 0; i < 1000; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(Generate, Deterministic) {
  SynthConfig cfg;
  cfg.n_source = 300;
  cfg.n_target = 200;
  cfg.label_noise_source = 0.1;
  cfg.seed = 77;
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  EXPECT_TRUE(a.source.scores().values() == b.source.scores().values());
  EXPECT_TRUE(a.target.scores().values() == b.target.scores().values());
  EXPECT_TRUE(a.source.labels() == b.source.labels());
  cfg.seed = 78;
  EXPECT_FALSE(generate(cfg).source.scores().values() == a.source.scores().values());
}

TEST(Generate, GrowingNKeepsEarlierRows) {
  SynthConfig cfg;
  cfg.n_source = 100;
  const auto small = generate(cfg);
  cfg.n_source = 250;
  const auto large = generate(cfg);
  EXPECT_TRUE(large.source.scores().values().topRows(100) == small.source.scores().values());
  EXPECT_TRUE(large.source.labels().head(100) == small.source.labels());
}

TEST(Generate, TruthMatchesRecount) {
  SynthConfig cfg;
  cfg.n_source = 1000;
  cfg.n_target = 1000;
  cfg.label_noise_target = 0.2;
  const auto out = generate(cfg);
  // Independent brute-force count over the emitted logits.
  const auto count = [](const LabeledLogits<double>& d) {
    int hits = 0;
    for (Index i = 0; i < d.size(); ++i) {
      int best = 0;
      for (int j = 1; j < d.classes(); ++j)
        if (d.scores()(i, j) > d.scores()(i, best)) best = j;
      hits += best == d.labels()[i];
    }
    return hits / 1000.0;
  };
  EXPECT_EQ(out.true_source_accuracy, count(out.source));
  EXPECT_EQ(out.true_target_accuracy, count(out.target));
}

TEST(Generate, HugeMarginIsPerfect) {
  SynthConfig cfg;
  cfg.margin_source = cfg.margin_target = 50;
  cfg.noise_source = cfg.noise_target = 0.1;
  const auto out = generate(cfg);
  EXPECT_EQ(out.true_source_accuracy, 1.0);
  EXPECT_EQ(out.true_target_accuracy, 1.0);
}

TEST(Generate, HalfLabelNoiseIsCoinFlip) {
  SynthConfig cfg;
  cfg.k = 2;
  cfg.n_source = 10000;
  cfg.margin_source = 50;
  cfg.noise_source = 0.1;
  cfg.label_noise_source = 0.5;
  const auto out = generate(cfg);
  EXPECT_NEAR(out.true_source_accuracy, 0.5, 3.0 / std::sqrt(10000.0));
}

TEST(Generate, NoShiftAccuraciesAgree) {
  SynthConfig cfg;
  cfg.n_source = cfg.n_target = 10000;
  cfg = cfg.without_shift();
  const auto out = generate(cfg);
  EXPECT_LE(std::abs(out.true_source_accuracy - out.true_target_accuracy), 3.0 / std::sqrt(10000.0));
}

TEST(Generate, TwoClassAccuracyMatchesAnalytic) {
  // P(correct) = P(margin + e0 > e1) = Phi(margin / (sigma sqrt 2)).
  const double margin = 1.0;
  const double sigma = 1.2;
  const double analytic = 0.5 * std::erfc(-(margin / (sigma * std::sqrt(2.0))) / std::sqrt(2.0));
  for (const Index n : {Index{20000}, Index{200000}}) {
    SynthConfig cfg;
    cfg.k = 2;
    cfg.n_source = n;
    cfg.n_target = 1;
    cfg.margin_source = margin;
    cfg.noise_source = sigma;
    cfg.seed = 2024;
    const double se = std::sqrt(analytic * (1 - analytic) / static_cast<double>(n));
    EXPECT_NEAR(generate(cfg).true_source_accuracy, analytic, 3 * se) << "n=" << n;
  }
}

TEST(Generate, PriorShapesLabelFrequencies) {
  SynthConfig cfg;
  cfg.n_source = 20000;
  cfg.prior_source = {0.7, 0.2, 0.1};
  const auto out = generate(cfg);
  const auto& y = out.source.labels();
  EXPECT_NEAR((y.array() == 0).count() / 20000.0, 0.7, 0.015);
  EXPECT_NEAR((y.array() == 2).count() / 20000.0, 0.1, 0.015);
}

TEST(Generate, LabelNoiseNeverKeepsTheClass) {
  SynthConfig cfg;
  cfg.k = 3;
  cfg.n_source = 2000;
  cfg.margin_source = 50;
  cfg.noise_source = 0.1;
  cfg.label_noise_source = 0.5;
  const auto out = generate(cfg);
  // Every flipped label differs from the argmax class, which is the drawn class.
  int flipped = 0;
  for (Index i = 0; i < out.source.size(); ++i) flipped += argmax(out.source.scores().row(i)) != out.source.labels()[i];
  EXPECT_NEAR(flipped / 2000.0, 0.5, 0.05);
}

TEST(Generate, RejectsInvalidConfigs) {
  const auto invalid = [](auto mutate) {
    SynthConfig cfg;
    mutate(cfg);
    try {
      generate(cfg);
    } catch (const Error& e) {
      return e.code() == ErrorCode::kInvalidConfig;
    }
    return false;
  };
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.n_source = 0; }));
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.n_target = 0; }));
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.k = 1; }));
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.prior_source = {0.5, 0.6, -0.1}; }));
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.prior_target = {0.5, 0.5}; }));
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.noise_source = 0; }));
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.label_noise_target = 0.6; }));
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.gen_temperature = -1; }));
  EXPECT_TRUE(invalid([](SynthConfig& c) { c.margin_source = INFINITY; }));
}

}  // namespace
}  // namespace shiftacc
