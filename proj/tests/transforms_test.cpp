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

#include "stability/transforms.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "stability/verify.hpp"

namespace stability {
namespace {

Outcome o(uint64_t v) { return outcome_from_u64(v); }

std::vector<Outcome> range(uint64_t n) {
  std::vector<Outcome> out;
  for (uint64_t i = 0; i < n; ++i) out.push_back(o(i));
  return out;
}

TEST(DPParamsTest, Ranges) {
  EXPECT_NO_THROW((DPParams{4, 0.1}.validate()));
  EXPECT_THROW((DPParams{0, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((DPParams{4.5, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((DPParams{1, 0.5}.validate()), std::invalid_argument);
}

TEST(ExpMechTest, ClosedFormProbabilities) {
  auto p = exp_mech_probs({0, 1}, 1, 2);
  double e = std::exp(1.0);
  EXPECT_NEAR(p[0], 1 / (1 + e), 1e-15);
  EXPECT_NEAR(p[1], e / (1 + e), 1e-15);
  // Huge scores do not overflow.
  auto q = exp_mech_probs({1e6, 1e6 - 2}, 1, 1);
  EXPECT_NEAR(q[0], 1 / (1 + std::exp(-1.0)), 1e-12);
}

TEST(ExpMechTest, SamplerMatchesProbabilities) {
  std::vector<double> scores = {0, -1, -3, 2};
  auto p = exp_mech_probs(scores, 1, 1.5);
  std::vector<uint64_t> counts(4, 0);
  TapeReader r(RandomTape(Seed{}).derive(1));
  for (int i = 0; i < 40000; ++i) counts[exp_mech_index(scores, 1, 1.5, r)]++;
  EXPECT_GT(chi_square_p_value(counts, p), 1e-4);
}

TEST(GeometricTest, CdfClosedForm) {
  double a = std::exp(-0.5);
  EXPECT_NEAR(two_sided_geometric_cdf(a, 0), 1 / (1 + a), 1e-15);
  EXPECT_NEAR(two_sided_geometric_cdf(a, -1), a / (1 + a), 1e-15);
  EXPECT_NEAR(two_sided_geometric_cdf(a, 3) + two_sided_geometric_cdf(a, -4), 1, 1e-15);
}

TEST(GeometricTest, SamplerMatchesPmf) {
  double a = std::exp(-0.5);
  std::vector<uint64_t> counts(9, 0);  // bins: <= -4, -3..3, >= 4
  TapeReader r(RandomTape(Seed{}).derive(2));
  for (int i = 0; i < 50000; ++i) {
    int64_t z = std::clamp<int64_t>(sample_two_sided_geometric(a, r), -4, 4);
    counts[static_cast<size_t>(z + 4)]++;
  }
  std::vector<double> p(9);
  p[0] = two_sided_geometric_cdf(a, -4);
  for (int z = -3; z <= 3; ++z) {
    p[z + 4] = two_sided_geometric_cdf(a, z) - two_sided_geometric_cdf(a, z - 1);
  }
  p[8] = 1 - two_sided_geometric_cdf(a, 3);
  EXPECT_GT(chi_square_p_value(counts, p), 1e-4);
}

TEST(SelectionTest, ThresholdAndAlpha) {
  Selection s{1, 0.05};
  EXPECT_EQ(s.threshold(), 1 + static_cast<int64_t>(std::ceil(2 * std::log(40.0))));
  EXPECT_EQ(s.threshold(), 9);
  EXPECT_DOUBLE_EQ(s.alpha(), std::exp(-0.5));
}

TEST(SelectionTest, DistributionMatchesRuns) {
  Selection s{1, 0.05};
  std::map<Outcome, uint64_t> counts = {{o(1), 10}, {o(2), 9}, {o(3), 2}};
  auto exact = s.distribution(counts);
  std::vector<Outcome> runs;
  for (uint64_t t = 0; t < 20000; ++t) runs.push_back(s.run(counts, RandomTape(Seed{}).derive({3, t})));
  auto emp = normalize(empirical(runs));
  std::vector<Outcome> all = {kBottom, o(1), o(2), o(3)};
  EXPECT_LT(tv_distance(align(exact, all), align(emp, all)), 0.02);
}

TEST(SelectionTest, NeighboringMultisetsAreIndistinguishable) {
  double eps = 1, delta = 0.05;
  std::vector<std::vector<Outcome>> bases = {
      {o(1)}, {o(1), o(1), o(2)}, std::vector<Outcome>(9, o(4)), std::vector<Outcome>(30, o(5))};
  for (auto base : bases) {
    for (uint64_t extra : {1, 4, 5, 6}) {
      auto bigger = base;
      bigger.push_back(o(extra));
      std::vector<Outcome> u = {kBottom, o(1), o(2), o(4), o(5), o(6)};
      auto p = align(dp_selection_distribution(base, eps, delta), u);
      auto q = align(dp_selection_distribution(bigger, eps, delta), u);
      EXPECT_TRUE(indistinguishable(p, q, eps, delta)) << base.size() << " + " << extra;
    }
  }
}

TEST(RepToDpTest, ResolvedConstants) {
  auto p = RepToDpParams::resolve(1, 0.05, 0.05);
  EXPECT_EQ(p.k1, 3u);
  EXPECT_EQ(p.k2, 72u);
  EXPECT_EQ(p.k2 % p.k1, 0u);
}

TEST(RepToDpTest, ExactLawMatchesRuns) {
  StatAlgorithm alg = toy_selection_algorithm(2);
  RepToDpParams params;
  params.k1 = 2;
  params.k2 = 12;
  params.dp = {4, 0.05};
  Sample pooled = {0, 1, 0, 1, 0, 0, 2, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 2, 0, 0, 1};
  auto exact = align(rep_to_dp_distribution(alg, pooled, params), {kBottom, o(0), o(1), o(2)});
  std::vector<Outcome> runs;
  for (uint64_t t = 0; t < 20000; ++t) {
    runs.push_back(rep_to_dp_on(alg, pooled, params, RandomTape(Seed{}).derive({4, t})));
  }
  auto emp = align(normalize(empirical(runs)), exact.outcomes());
  EXPECT_LT(tv_distance(exact, emp), 0.02);
  EXPECT_GT(exact.prob(o(0)), 0.5);
}

TEST(RepToDpTest, PrivacyAtLargeEps) {
  RepToDpCheck cfg;
  cfg.eps = 4;
  cfg.trials = 200;
  auto res = check_rep_to_dp(cfg, RandomTape(Seed{}).derive(5));
  EXPECT_TRUE(res.pass());
}

TEST(RepToPgTest, ResolvedConstants) {
  auto p = RepToPgParams::resolve(1, 0.1, 0.1);
  EXPECT_EQ(p.k, 3u);
  EXPECT_EQ(p.t, 29u);
  EXPECT_NEAR(p.sensitivity(), 4 * std::sqrt(29 * std::log(8.0 * 3 * 29 / 0.1)), 1e-12);
}

TEST(RepToPgTest, PluralityTiesGoToLeast) {
  EXPECT_EQ(plurality({o(3), o(1), o(3), o(1)}), std::make_pair(o(1), uint64_t{2}));
  EXPECT_EQ(plurality({o(2), o(3), o(3)}), std::make_pair(o(3), uint64_t{2}));
}

TEST(RepToPgTest, ExactLawMatchesRuns) {
  StatAlgorithm alg = threshold_algorithm(4);
  RepToPgParams params;
  params.k = 2;
  params.t = 3;
  params.eps = 1;
  Sample pooled(2 * 3 * 4, 0);
  for (size_t i = 0; i < pooled.size(); i += 3) pooled[i] = 1;
  auto exact = align(rep_to_pg_distribution(alg, pooled, params), alg.output_space);
  std::vector<Outcome> runs;
  for (uint64_t t = 0; t < 20000; ++t) {
    runs.push_back(rep_to_pg_on(alg, pooled, params, RandomTape(Seed{}).derive({6, t})));
  }
  EXPECT_LT(tv_distance(exact, align(normalize(empirical(runs)), alg.output_space)), 0.02);
}

TEST(DpToRepTest, MarginalAndSharedTape) {
  FiniteClass cls = graded_class(4, 8);
  StatAlgorithm alg = exp_mech_learner_algorithm(cls, 0.5, 10);
  Sample s(10);
  for (size_t i = 0; i < 10; ++i) s[i] = labeled_record(static_cast<uint32_t>(i % 8), cls.label(0, i % 8));
  auto exact = align(alg.exact_output_distribution(s), alg.output_space);
  std::vector<Outcome> runs;
  for (uint64_t t = 0; t < 20000; ++t) {
    auto r = dp_to_rep(alg, s, RandomTape(Seed{}).derive({7, t}));
    EXPECT_FALSE(r.approximate);
    runs.push_back(r.output);
  }
  EXPECT_LT(tv_distance(exact, align(normalize(empirical(runs)), alg.output_space)), 0.02);
}

TEST(DpToRepTest, FallbackEstimatesTheLaw) {
  StatAlgorithm alg = toy_selection_algorithm(3);
  alg.exact_output_distribution = nullptr;
  Sample s = {0, 1, 1};
  auto r = dp_to_rep(alg, s, RandomTape(Seed{}).derive(8), 2000);
  EXPECT_TRUE(r.approximate);
  EXPECT_TRUE(r.output == o(0) || r.output == o(1));
  EXPECT_THROW(dp_to_rep(alg, s, RandomTape(Seed{}).derive(8)), std::invalid_argument);
}

TEST(SubsampleTest, ParametersAndUniformChoice) {
  StatAlgorithm first = finite_coin_algorithm(1, range(4), 1, [](const Sample& s, uint64_t) {
    return o(s[0]);
  });
  auto same = subsample_amplify(first, 1, 0.5, 0.01);
  EXPECT_NEAR(same.eps, std::exp(0.5) - 1, 1e-15);
  auto amp = subsample_amplify(first, 4, 1.0, 0.01);
  EXPECT_NEAR(amp.eps, (std::exp(1.0) - 1) / 4, 1e-15);
  EXPECT_NEAR(amp.delta, 0.0025, 1e-15);
  std::vector<uint64_t> counts(4, 0);
  for (uint64_t t = 0; t < 8000; ++t) {
    counts[outcome_to_u64(amp.alg.run({0, 1, 2, 3}, RandomTape(Seed{}).derive({9, t})))]++;
  }
  EXPECT_GT(chi_square_p_value(counts, std::vector<double>(4, 0.25)), 1e-4);
  EXPECT_THROW(subsample_amplify(first, 0, 1, 0.01), std::invalid_argument);
}

TEST(ExpMechLearnerTest, ScoresAreMistakeCounts) {
  auto cls = FiniteClass::from_strings({"00", "01", "11"});
  LabeledSample s = {{0, 0}, {1, 1}, {1, 1}};
  auto p = dp_exp_mech_learner_probs(cls, 2, s);
  // Mistakes 2, 0, 1 -> weights e^-2, 1, e^-1.
  double z = std::exp(-2.0) + 1 + std::exp(-1.0);
  EXPECT_NEAR(p[0], std::exp(-2.0) / z, 1e-15);
  EXPECT_NEAR(p[1], 1 / z, 1e-15);
  EXPECT_NEAR(p[2], std::exp(-1.0) / z, 1e-15);
}

}  // namespace
}  // namespace stability
