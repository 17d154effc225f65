//
// Copyright 2026 The stability-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "stability/learners.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "stability/verify.hpp"

namespace stability {
namespace {

TEST(FiniteClassTest, DeduplicatesAndRoundTrips) {
  auto cls = FiniteClass::from_strings({"0110", "1111", "0110", "0000"});
  ASSERT_EQ(cls.size(), 3u);
  EXPECT_EQ(cls.row(0), "0110");
  EXPECT_EQ(cls.row(2), "0000");
  EXPECT_EQ(cls.label(1, 3), 1);
  auto back = FiniteClass::from_json(cls.to_json());
  EXPECT_EQ(back.size(), 3u);
  EXPECT_EQ(back.row(1), "1111");
  EXPECT_THROW(FiniteClass::from_strings({"01", "011"}), std::invalid_argument);
  EXPECT_THROW(FiniteClass::from_strings({"0a"}), std::invalid_argument);
}

TEST(RiskTest, HandComputed) {
  auto cls = FiniteClass::from_strings({"01", "11"});
  FiniteDistribution d({outcome_from_u64(labeled_record(0, 0)), outcome_from_u64(labeled_record(1, 1))},
                       {0.5, 0.5});
  EXPECT_DOUBLE_EQ(true_risk(cls, 0, d), 0);
  EXPECT_DOUBLE_EQ(true_risk(cls, 1, d), 0.5);
  EXPECT_DOUBLE_EQ(optimal_risk(cls, d), 0);
  LabeledSample s = {{0, 1}, {1, 1}, {0, 0}};
  EXPECT_EQ(empirical_risk(cls, 0, s), Rational(1, 3));
  EXPECT_EQ(empirical_risk(cls, 1, s), Rational(1, 3));
  EXPECT_THROW(empirical_risk(cls, 0, {}), std::invalid_argument);
}

TEST(RiskTest, MistakeCountsMatchBruteForce) {
  FiniteClass cls = graded_class(9, 12);
  TapeReader r(RandomTape(Seed{}).derive(1));
  LabeledSample s;
  for (int i = 0; i < 200; ++i) {
    s.push_back({static_cast<uint32_t>(r.below(12)), static_cast<uint8_t>(r.coin())});
  }
  auto counts = mistake_counts(cls, s);
  for (size_t h = 0; h < cls.size(); ++h) {
    uint64_t brute = 0;
    for (const auto& p : s) brute += cls.label(h, p.x) != p.y;
    EXPECT_EQ(counts[h], brute);
    EXPECT_EQ(empirical_risk(cls, h, s), Rational(static_cast<int64_t>(brute), 200));
  }
}

TEST(EstimateOptTest, HandComputedBuckets) {
  Rational alpha(1, 2);
  EXPECT_EQ(estimate_opt_rule(0, alpha, 0), Rational(1, 8));
  EXPECT_EQ(estimate_opt_rule(0, alpha, uint64_t{1} << 52), Rational(5, 64));
  EXPECT_EQ(estimate_opt_rule(1, alpha, 0), Rational(1));
}

TEST(EstimateOptTest, LandsInTheBucketBelowTheShiftedTarget) {
  Rational alpha(1, 5);
  TapeReader r(RandomTape(Seed{}).derive(2));
  for (int i = 0; i < 200; ++i) {
    Rational opt(static_cast<int64_t>(r.below(100)), 200);
    uint64_t k = r.bits(53);
    Rational v = estimate_opt_rule(opt, alpha, k);
    Rational target = opt + alpha / 4;
    EXPECT_LE(v, target);
    EXPECT_LT(target, v + alpha / 8);
  }
}

TEST(LearnerParamsTest, FrozenAtTheBenchmarkScale) {
  auto p = LearnerParams::resolve(0.2, 0.2, 0.1, true, 32);
  double ln_h = std::log(32.0), r4 = std::pow(0.2, 4);
  double m = (1.0 / 16) * (ln_h * ln_h * std::log(5.0) + r4 * std::log(10.0)) / (0.2 * r4);
  EXPECT_EQ(p.m, static_cast<size_t>(std::ceil(m)));
  EXPECT_EQ(p.m, 3777u);
  EXPECT_EQ(p.tau, Rational(1, 220));
  EXPECT_EQ(p.threshold_count(), 10u);
  EXPECT_NO_THROW(p.validate(32));
  EXPECT_THROW(LearnerParams::resolve(1.2, 0.2, 0.1, true, 32), std::invalid_argument);
}

TEST(FiniteLearnerTest, OutputSatisfiesItsThreshold) {
  FiniteClass cls = graded_class(16, 32);
  FiniteDistribution d = realizable_distribution(cls, 3);
  auto params = LearnerParams::resolve(0.3, 0.25, 0.1, true, cls.size());
  DataSampler sampler(d);
  for (uint64_t t = 0; t < 20; ++t) {
    DataSource src(sampler, RandomTape(Seed{}).derive({3, t, 1}));
    LearnTrace trace;
    size_t h = r_finite_learn(cls, src, params, RandomTape(Seed{}).derive({3, t, 0}), &trace);
    ASSERT_LT(trace.threshold_index, params.threshold_count());
    EXPECT_EQ(trace.v, trace.v_init + Rational(static_cast<int64_t>(2 * trace.threshold_index + 3)) *
                                          params.tau / 2);
    EXPECT_FALSE(trace.fallback);
    EXPECT_NE(std::find(trace.below.begin(), trace.below.end(), h), trace.below.end());
    EXPECT_LE(true_risk(cls, h, d), 0.25);
  }
}

TEST(FiniteLearnerTest, ReplicableAtSmallScale) {
  FiniteClass cls = graded_class(16, 32);
  LearnerCheck cfg{0.3, 0.25, 0.1, 60, {}};
  auto res = check_finite_learner(cfg, cls, realizable_distribution(cls, 0), RandomTape(Seed{}).derive(4));
  EXPECT_TRUE(res.pass());
}

TEST(RandomOrderingTest, ExactIdentity) {
  for (unsigned u : {1u, 3u, 5u}) EXPECT_TRUE(check_random_ordering(u).pass()) << u;
}

TEST(AmplifyTest, SyntheticBaseBecomesReplicable) {
  // Base: hypothesis 2 on 3/4 of its coin strings, else the sample's point.
  Learner base;
  base.sample_size = 1;
  base.class_size = 5;
  base.run = [](const LabeledSample& s, const RandomTape& coins) -> size_t {
    TapeReader r(coins);
    return r.below(4) != 0 ? 2 : s[0].x;
  };
  DataLearner amp = amplify_replicability(base, 0.1, 0.1);
  std::vector<Outcome> o;
  for (uint32_t x = 0; x < 5; ++x) o.push_back(outcome_from_u64(labeled_record(x, 0)));
  DataSampler sampler(FiniteDistribution(o, std::vector<double>(5, 0.2)));
  uint64_t same = 0;
  for (uint64_t t = 0; t < 50; ++t) {
    DataSource a(sampler, RandomTape(Seed{}).derive({5, t, 1}));
    DataSource b(sampler, RandomTape(Seed{}).derive({5, t, 2}));
    RandomTape coins = RandomTape(Seed{}).derive({5, t, 0});
    size_t ha = amp(a, coins), hb = amp(b, coins);
    same += ha == hb;
    EXPECT_EQ(ha, 2u);
  }
  EXPECT_EQ(same, 50u);
}

TEST(HeavyHitterTest, ParamsAndSmallRun) {
  auto p = HeavyHitterParams::resolve(0.8, 0.2, 0.1, 8);
  EXPECT_EQ(p.grid, static_cast<size_t>(std::ceil(std::log(8.0) / (8 * 0.25 * 0.2))));
  EXPECT_DOUBLE_EQ(p.tau, 0.8 / (8.0 * static_cast<double>(p.grid)));
  EXPECT_EQ(p.t1, static_cast<size_t>(std::ceil(std::log(8 / (0.2 * 0.1)) / 0.8)));
  HeavyHitterCheck cfg;
  cfg.runs = 40;
  cfg.pairs = 20;
  auto res = check_list_heavy_hitter(cfg, RandomTape(Seed{}).derive(6));
  EXPECT_EQ(res.metrics[0].value, 1.0);
}

TEST(HeavyHitterTest, NothingHeavyGivesNoOutput) {
  SubsetSampler s;
  s.universe_size = 64;
  s.max_subset_size = 1;
  s.generate = [](DataSource& d) { return std::vector<uint32_t>{static_cast<uint32_t>(d.reader().below(64))}; };
  DataSampler unit(FiniteDistribution::point_mass(outcome_from_u64(0)));
  DataSource src(unit, RandomTape(Seed{}).derive({7, 1}));
  EXPECT_EQ(list_heavy_hitter(s, 0.8, 0.2, 0.1, src, RandomTape(Seed{}).derive({7, 0})), std::nullopt);
}

TEST(AgnosticTest, NoisyLabelsStillNearOptimal) {
  auto cls = FiniteClass::from_strings({"0000", "0011", "1111"});
  // Labels follow hypothesis 1 with 10% noise.
  std::vector<Outcome> o;
  std::vector<double> p;
  for (uint32_t x = 0; x < 4; ++x) {
    for (uint8_t y = 0; y < 2; ++y) {
      o.push_back(outcome_from_u64(labeled_record(x, y)));
      p.push_back(0.25 * (y == cls.label(1, x) ? 0.9 : 0.1));
    }
  }
  FiniteDistribution d(o, p);
  DataSampler sampler(d);
  DataSource src(sampler, RandomTape(Seed{}).derive({8, 1}));
  auto h = agnostic_learn(cls, src, 0.3, 0.3, 0.2, RandomTape(Seed{}).derive({8, 0}));
  ASSERT_TRUE(h.has_value());
  EXPECT_LE(true_risk(cls, *h, d), optimal_risk(cls, d) + 0.3);
}

}  // namespace
}  // namespace stability
