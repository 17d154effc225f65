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

#ifndef STABILITY_VERIFY_HPP_
#define STABILITY_VERIFY_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "stability/circuit.hpp"
#include "stability/experiment.hpp"
#include "stability/rand.hpp"

namespace stability {

// Metrics plus the resolved constants behind them.
struct CheckResult {
  std::vector<Metric> metrics;
  std::map<std::string, double> constants;
  std::map<std::string, std::string> notes;

  bool pass() const;
};

TruthTableCircuit random_circuit(unsigned in_bits, unsigned out_bits, TapeReader& reader);

CheckResult check_pairwise_independence(unsigned max_in = 4, unsigned max_out = 3);

struct ConsistentSamplerCheck {
  size_t pairs = 20;
  uint64_t tapes = 100000;
  size_t max_support = 64;
  double tv_lo = 0.05;
  double tv_hi = 0.5;
  double chi2_alpha = 1e-3;
};
// Explicit pairs bypass the random generation when non-empty.
CheckResult check_consistent_sampler(
    const ConsistentSamplerCheck& cfg, const RandomTape& tape,
    const std::vector<std::pair<FiniteDistribution, FiniteDistribution>>& explicit_pairs = {});

struct CorrSampCheck {
  unsigned m = 6;
  unsigned n = 4;
  double nu = 0.1;
  size_t circuits = 2;
  uint64_t runs = 100000;  // total, split evenly across circuits
  CorrSampConstants constants;
};
CheckResult check_corrsamp_accuracy(const CorrSampCheck& cfg, const RandomTape& tape,
                                    const std::vector<TruthTableCircuit>& fixed = {});

struct CorrSampPairCheck {
  unsigned m = 6;
  unsigned n = 4;
  double nu = 0.1;
  size_t pairs = 10;
  uint64_t tapes = 10000;
  double max_tv = 0.1;
  CorrSampConstants constants;
};
CheckResult check_corrsamp_correlation(
    const CorrSampPairCheck& cfg, const RandomTape& tape,
    const std::vector<std::pair<TruthTableCircuit, TruthTableCircuit>>& fixed = {});

struct LearnerCheck {
  double rho = 0.2;
  double alpha = 0.2;
  double beta = 0.1;
  uint64_t trials = 200;
  LearnerConstants constants;
};
// |H| = 32 over D = 64: hypothesis i disagrees with a fixed target on i points.
FiniteClass graded_class(size_t hypotheses, size_t domain);
// Uniform x, labels from hypothesis h of the class.
FiniteDistribution realizable_distribution(const FiniteClass& cls, size_t h);
CheckResult check_finite_learner(const LearnerCheck& cfg, const FiniteClass& cls,
                                 const FiniteDistribution& data, const RandomTape& tape);

CheckResult check_random_ordering(unsigned universe = 5);

struct RepToDpCheck {
  double eps = 1.0;
  double delta = 0.05;
  double beta = 0.05;
  uint64_t trials = 1000;  // correctness runs; 0 skips them
  RepToDpConstants constants;
};
// Base algorithm on records {0,1,2}: returns record (coin mod n) of its
// sample, four coins.
StatAlgorithm toy_selection_algorithm(size_t n);
CheckResult check_rep_to_dp(const RepToDpCheck& cfg, const RandomTape& tape);

struct RepToPgCheck {
  double eps = 1.0;
  double delta = 0.1;
  double beta = 0.1;
  size_t k = 4;
  size_t t = 64;
  size_t n = 32;
  double bias = 0.3;
  uint64_t pairs = 200;
};
// 1[mean of n Bernoulli records >= (c + 1/2)/16] for coin c in [0, 16).
StatAlgorithm threshold_algorithm(size_t n);
CheckResult check_rep_to_pg(const RepToPgCheck& cfg, const RandomTape& tape);

struct DpToRepCheck {
  double rho = 0.1;
  size_t sample_size = 50;
  uint64_t runs = 100000;
  uint64_t pairs = 10000;
};
CheckResult check_dp_to_rep(const DpToRepCheck& cfg, const RandomTape& tape);

struct DPRandEncCheck {
  unsigned p = 7;
  unsigned q = 11;
  size_t m = 6;
  double eps = 0.5;  // k = 2
};
CheckResult check_dp_rand_enc(const DPRandEncCheck& cfg, const RandomTape& tape);

CheckResult check_rerandomization(unsigned p, unsigned q, const RandomTape& tape);

struct AdversaryCheck {
  unsigned prime_bits = 16;
  uint64_t challenges = 1000;
  size_t m = 10;
};
CheckResult check_adversary(const AdversaryCheck& cfg, const RandomTape& tape);

struct HeavyHitterCheck {
  double eta = 0.8;
  double rho = 0.2;
  double beta = 0.1;
  uint64_t runs = 1000;
  uint64_t pairs = 500;
  HeavyHitterConstants constants;
};
// |Omega| = 32: element 0 w.p. 0.85, element 1 w.p. 0.45, plus 3 of the
// other 30 uniformly. Max subset size declared as 8.
SubsetSampler benchmark_subset_sampler();
double benchmark_weight(uint32_t element);
CheckResult check_list_heavy_hitter(const HeavyHitterCheck& cfg, const RandomTape& tape);

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<CheckResult(const RandomTape&)> run;
};

const std::vector<Criterion>& acceptance_criteria();
Seed acceptance_seed();

}  // namespace stability

#endif  // STABILITY_VERIFY_HPP_
