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

#include "stability/corrsamp.hpp"

#include <gtest/gtest.h>

#include "stability/verify.hpp"

namespace stability {
namespace {

std::vector<Outcome> range(uint64_t n) {
  std::vector<Outcome> out;
  for (uint64_t i = 0; i < n; ++i) out.push_back(outcome_from_u64(i));
  return out;
}

TEST(ConsistentSampleTest, MarginalMatches) {
  FiniteDistribution p(range(4), {0.1, 0.2, 0.3, 0.4});
  std::vector<uint64_t> counts(4, 0);
  for (uint64_t t = 0; t < 20000; ++t) {
    counts[outcome_to_u64(consistent_sample(p, RandomTape(Seed{}).derive({1, t})))]++;
  }
  EXPECT_GT(chi_square_p_value(counts, p.probs()), 1e-4);
}

TEST(ConsistentSampleTest, CouplingWithinBound) {
  FiniteDistribution p(range(3), {0.5, 0.3, 0.2});
  FiniteDistribution q(range(3), {0.4, 0.3, 0.3});
  double tv = tv_distance(p, q);
  uint64_t differ = 0, n = 20000;
  for (uint64_t t = 0; t < n; ++t) {
    RandomTape shared = RandomTape(Seed{}).derive({2, t});
    differ += consistent_sample(p, shared) != consistent_sample(q, shared);
  }
  double rate = static_cast<double>(differ) / static_cast<double>(n);
  EXPECT_LE(rate, 2 * tv / (1 + tv) + 3 * wald_half_width(rate, n));
  // Identical inputs never disagree.
  EXPECT_EQ(consistent_sample(p, RandomTape(Seed{1, 1})), consistent_sample(p, RandomTape(Seed{1, 1})));
}

TEST(CorrSampParamsTest, FrozenDefaults) {
  auto p = CorrSampParams::resolve(6, 0.1);
  EXPECT_EQ(p.k, 4u);
  EXPECT_EQ(p.T1, 885u);
  EXPECT_EQ(p.T2, 909u);
  CorrSampConstants c{0, 1.0, 0.0625};
  EXPECT_EQ(CorrSampParams::resolve(6, 0.1, c).k, 6u);
}

TEST(CorrSampParamsTest, RejectsBadInputs) {
  EXPECT_THROW(CorrSampParams::resolve(6, 0.7), std::invalid_argument);
  EXPECT_THROW(CorrSampParams::resolve(6, 0.1, {-2, 0.0, 1.0}), std::invalid_argument);
  auto p = CorrSampParams::resolve(6, 0.1);
  p.T2 = 10;
  EXPECT_THROW(p.validate(6), std::invalid_argument);
}

class CorrSamplerTest : public ::testing::Test {
 protected:
  CorrSamplerTest() : circuit_(make()) {}
  static TruthTableCircuit make() {
    TapeReader r(RandomTape(Seed{}).derive(99));
    return random_circuit(6, 4, r);
  }
  TruthTableCircuit circuit_;
};

TEST_F(CorrSamplerTest, FastPathMatchesReference) {
  CorrSampler s(circuit_, CorrSampParams::resolve(6, 0.1));
  for (uint64_t t = 0; t < 15; ++t) {
    RandomTape tape = RandomTape(Seed{}).derive({3, t});
    CorrSampStats a, b;
    EXPECT_EQ(s.sample(tape, &a), s.sample(tape, &b, ElemFindPath::kReference)) << t;
    EXPECT_EQ(a.rounds_used, b.rounds_used);
  }
}

TEST_F(CorrSamplerTest, JointSamplingMatchesSeparateRuns) {
  auto table = circuit_.table();
  table[0] ^= 3;
  table[9] ^= 5;
  TruthTableCircuit other(6, 4, table);
  auto params = CorrSampParams::resolve(6, 0.1);
  CorrSampler a(circuit_, params), b(other, params);
  for (uint64_t t = 0; t < 200; ++t) {
    RandomTape tape = RandomTape(Seed{}).derive({8, t});
    auto joint = sample_jointly({&a, &b}, tape);
    ASSERT_EQ(joint.size(), 2u);
    EXPECT_EQ(joint[0], a.sample(tape)) << t;
    EXPECT_EQ(joint[1], b.sample(tape)) << t;
  }
  CorrSampler wide(TruthTableCircuit(6, 5, std::vector<uint64_t>(64, 0)), params);
  EXPECT_THROW(sample_jointly({&a, &wide}, RandomTape(Seed{})), std::invalid_argument);
}

TEST_F(CorrSamplerTest, OutputsLieInTheImage) {
  CorrSampler s(circuit_, CorrSampParams::resolve(6, 0.1));
  auto d = induced_distribution(circuit_);
  for (uint64_t t = 0; t < 300; ++t) {
    auto y = s.sample(RandomTape(Seed{}).derive({4, t}));
    if (y) EXPECT_GT(d.prob(circuit_outcome(*y)), 0);
  }
  auto tape = RandomTape(Seed{}).derive({4, 0});
  EXPECT_EQ(s.sample(tape), corr_samp(circuit_, 0.1, InverterOracle::exact(), tape));
}

TEST_F(CorrSamplerTest, SmallScaleAccuracy) {
  CorrSampCheck cfg;
  cfg.runs = 3000;
  auto res = check_corrsamp_accuracy(cfg, RandomTape(Seed{}).derive(5), {circuit_});
  EXPECT_TRUE(res.pass());
  EXPECT_EQ(res.constants.at("T2"), 909);
}

TEST_F(CorrSamplerTest, NearbyCircuitsUsuallyAgree) {
  auto table = circuit_.table();
  table[5] ^= 1;
  TruthTableCircuit other(6, 4, table);
  CorrSampPairCheck cfg;
  cfg.tapes = 1000;
  auto res = check_corrsamp_correlation(cfg, RandomTape(Seed{}).derive(6), {{circuit_, other}});
  EXPECT_TRUE(res.pass());
}

TEST(CorrSampFailureTest, FailingInverterRaisesBottomRate) {
  TruthTableCircuit c(3, 2, {0, 1, 2, 3, 0, 1, 2, 3});
  auto params = CorrSampParams::resolve(3, 0.1);
  CorrSampler exact(c, params);
  CorrSampler broken(c, params, InverterOracle::with_failure(1.0, Seed{0, 3}));
  uint64_t bot_exact = 0, bot_broken = 0;
  for (uint64_t t = 0; t < 20; ++t) {
    auto tape = RandomTape(Seed{}).derive({7, t});
    bot_exact += !exact.sample(tape).has_value();
    bot_broken += !broken.sample(tape).has_value();
  }
  EXPECT_EQ(bot_broken, 20u);
  EXPECT_LE(bot_exact, 5u);
}

}  // namespace
}  // namespace stability
