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

#ifndef STABILITY_TRANSFORMS_HPP_
#define STABILITY_TRANSFORMS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "stability/dist.hpp"
#include "stability/learners.hpp"
#include "stability/rand.hpp"

namespace stability {

// A randomized algorithm on n records with a finite output space.
// run_with_coin and coin_space_size are set together when the coins range
// over a small finite set; run(s, tape) then equals
// run_with_coin(s, TapeReader(tape).below(coin_space_size)).
struct StatAlgorithm {
  std::function<Outcome(const Sample&, const RandomTape&)> run;
  size_t sample_size = 0;
  std::vector<Outcome> output_space;
  std::function<FiniteDistribution(const Sample&)> exact_output_distribution;
  uint64_t coin_space_size = 0;
  std::function<Outcome(const Sample&, uint64_t)> run_with_coin;
};

StatAlgorithm finite_coin_algorithm(size_t sample_size, std::vector<Outcome> output_space,
                                    uint64_t coin_space_size,
                                    std::function<Outcome(const Sample&, uint64_t)> fn);

struct DPParams {
  double eps = 1;
  double delta = 0.05;
  void validate() const;  // eps in (0, 4], delta in (0, 0.5)
};

// Index i with probability proportional to exp(eps * score_i / (2 sens)).
size_t exp_mech_index(const std::vector<double>& scores, double sensitivity, double eps,
                      TapeReader& reader);
std::vector<double> exp_mech_probs(const std::vector<double>& scores, double sensitivity,
                                   double eps);
Outcome exp_mech(const std::vector<Outcome>& candidates, const std::vector<double>& scores,
                 double sensitivity, double eps, const RandomTape& tape);

// Noisy argmax over the observed items with two-sided geometric noise,
// P(Z = z) proportional to exp(-eps |z| / 2). Ties go to the least item.
// Returns kBottom unless the winning noisy count reaches threshold().
struct Selection {
  double eps;
  double delta;
  int64_t threshold() const;  // 1 + ceil(2 ln(2/delta) / eps)
  double alpha() const;       // exp(-eps / 2)

  Outcome run(const std::map<Outcome, uint64_t>& counts, const RandomTape& tape) const;
  FiniteDistribution distribution(const std::map<Outcome, uint64_t>& counts) const;
};

Outcome dp_selection(const std::vector<Outcome>& items, double eps, double delta,
                     const RandomTape& tape);
FiniteDistribution dp_selection_distribution(const std::vector<Outcome>& items, double eps,
                                             double delta);

int64_t sample_two_sided_geometric(double alpha, TapeReader& reader);
// P(Z <= z) for the two-sided geometric law with parameter alpha.
double two_sided_geometric_cdf(double alpha, int64_t z);

struct RepToDpConstants {
  double c_k1 = 1.0;
  double c_k2 = 4.0;
  // Failure bound c_fail * beta * ln(1/beta) used by the harness.
  double c_fail = 1.0;
};

struct RepToDpParams {
  size_t k1 = 0;  // coin streams
  size_t k2 = 0;  // total partitions, a multiple of k1
  DPParams dp;

  // k1 = ceil(c_k1 ln(1/beta)); k2 = k1 * ceil(c_k2 (ln(1/delta)/eps + ln(1/beta))).
  static RepToDpParams resolve(double eps, double delta, double beta,
                               const RepToDpConstants& constants = {});
  void validate() const;
};

// Pooled sample split into k2 consecutive blocks of n; block b = j*(k2/k1) + i
// runs with coins tape[0, j]. Selection reads tape[1].
Outcome rep_to_dp_on(const StatAlgorithm& alg, const Sample& pooled,
                     const RepToDpParams& params, const RandomTape& tape);
Outcome rep_to_dp(const StatAlgorithm& alg, const RepToDpParams& params, DataSource& data,
                  const RandomTape& tape);
// Exact output law on a fixed pooled sample; needs a finite coin space.
FiniteDistribution rep_to_dp_distribution(const StatAlgorithm& alg, const Sample& pooled,
                                          const RepToDpParams& params);

struct RepToPgConstants {
  double c_k = 1.0;
  double c_t = 1.0;
};

struct RepToPgParams {
  size_t k = 0;
  size_t t = 0;
  double eps = 1;
  double delta = 0.1;
  double beta = 0.1;

  // k = ceil(c_k ln(1/delta)); t = ceil(c_t ln^4(1/beta) max(1, ln(1/eps)) / eps^2).
  static RepToPgParams resolve(double eps, double delta, double beta,
                               const RepToPgConstants& constants = {});
  // 4 sqrt(t ln(8kt/beta))
  double sensitivity() const;
  void validate() const;
};

// Plurality with the least outcome winning ties.
std::pair<Outcome, uint64_t> plurality(const std::vector<Outcome>& outputs);

// Stage j uses coins tape[0, j] on the t samples pooled[(j*t + i)*n ...];
// the mechanism reads tape[1].
Outcome rep_to_pg_on(const StatAlgorithm& alg, const Sample& pooled,
                     const RepToPgParams& params, const RandomTape& tape);
Outcome rep_to_pg(const StatAlgorithm& alg, const RepToPgParams& params, DataSource& data,
                  const RandomTape& tape);
FiniteDistribution rep_to_pg_distribution(const StatAlgorithm& alg, const Sample& pooled,
                                          const RepToPgParams& params);

struct DpToRepResult {
  Outcome output;
  bool approximate = false;
};

// Consistent sampling from the algorithm's output law on `sample`, listed
// over alg.output_space. Without an exact law, and with fallback_runs > 0,
// the law is estimated from that many runs on tape[1, l]; the sampler
// reads tape[0].
DpToRepResult dp_to_rep(const StatAlgorithm& alg, const Sample& sample,
                        const RandomTape& tape, uint64_t fallback_runs = 0);

constexpr uint64_t kDpToRepFallbackRuns = 10000;

struct SubsampleResult {
  StatAlgorithm alg;
  double eps = 0;
  double delta = 0;
};

// Wrapper on m records: n of them chosen without replacement by tape[0],
// inner coins tape[1]. eps' = (n/m)(e^eps - 1), delta' = (n/m) delta.
SubsampleResult subsample_amplify(const StatAlgorithm& alg, size_t m, double eps,
                                  double delta);

size_t dp_exp_mech_learner(const FiniteClass& cls, double eps, const LabeledSample& s,
                           const RandomTape& tape);
std::vector<double> dp_exp_mech_learner_probs(const FiniteClass& cls, double eps,
                                              const LabeledSample& s);
// As a StatAlgorithm on n records 2x+y; outputs are outcome_from_u64(h).
StatAlgorithm exp_mech_learner_algorithm(const FiniteClass& cls, double eps, size_t n);

}  // namespace stability

#endif  // STABILITY_TRANSFORMS_HPP_
