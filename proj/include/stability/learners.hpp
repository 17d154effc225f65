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

#ifndef STABILITY_LEARNERS_HPP_
#define STABILITY_LEARNERS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stability/dist.hpp"
#include "stability/rand.hpp"
#include "stability/rational.hpp"

namespace stability {

// Hypotheses over the domain {0..D-1}; hypothesis i labels x by bit(i, x).
// Duplicate bit-vectors collapse, keeping the first occurrence.
class FiniteClass {
 public:
  FiniteClass(size_t domain_size, const std::vector<std::vector<uint8_t>>& hypotheses);

  // Each string has one '0'/'1' character per domain point.
  static FiniteClass from_strings(const std::vector<std::string>& rows);
  // {"domain_size": D, "hypotheses": ["0110...", ...]}
  static FiniteClass from_json(std::string_view text);
  std::string to_json() const;

  size_t domain_size() const { return domain_size_; }
  size_t size() const { return labels_.size() / domain_size_; }
  uint8_t label(size_t h, size_t x) const { return labels_[h * domain_size_ + x]; }
  std::string row(size_t h) const;

 private:
  size_t domain_size_;
  std::vector<uint8_t> labels_;
};

struct LabeledPoint {
  uint32_t x;
  uint8_t y;
};
using LabeledSample = std::vector<LabeledPoint>;

// Data records for labeled distributions are 2x + y.
inline Record labeled_record(uint32_t x, uint8_t y) { return 2 * Record{x} + y; }
LabeledSample to_labeled(const Sample& records);

// Risk of h under a labeled distribution given as records 2x+y.
double true_risk(const FiniteClass& cls, size_t h, const FiniteDistribution& data);
double optimal_risk(const FiniteClass& cls, const FiniteDistribution& data);

Rational empirical_risk(const FiniteClass& cls, size_t h, const LabeledSample& s);
// Mistake count of every hypothesis, via per-point label counts.
std::vector<uint64_t> mistake_counts(const FiniteClass& cls, const LabeledSample& s);

// Shift a = (alpha/16) * K/2^53 from the tape; buckets
// [j*alpha/8 + a, (j+1)*alpha/8 + a); returns the lower limit of the bucket
// holding OPT_S + alpha/4, clamped to [0, 1].
Rational estimate_opt(const FiniteClass& cls, const LabeledSample& s,
                      const Rational& alpha, const RandomTape& tape);
// Same rule with OPT_S and the shift numerator K given directly.
Rational estimate_opt_rule(const Rational& opt_s, const Rational& alpha, uint64_t shift_k);

struct LearnerConstants {
  double c_tau = 2.0;
  double c_m = 1.0 / 16;
};

struct LearnerParams {
  double rho = 0.2;
  double alpha = 0.2;
  double beta = 0.1;
  Rational alpha_r;
  Rational tau;
  size_t m = 0;
  bool realizable = true;
  LearnerConstants constants;

  // tau = (alpha/4) / ceil((alpha/4) / (c_tau * alpha * rho^2 / ln|H|)),
  // with at least two intervals; m from the sample-size formula.
  static LearnerParams resolve(double rho, double alpha, double beta,
                               bool realizable, size_t class_size,
                               const LearnerConstants& constants = {});
  void validate(size_t class_size) const;
  size_t threshold_count() const;
  static size_t sample_size(double rho, double alpha, double beta,
                            bool realizable, size_t class_size, double c_m);
};

struct LearnTrace {
  Rational v_init;
  Rational v;
  size_t threshold_index = 0;
  std::vector<size_t> below;  // hypotheses with empirical risk <= v
  bool fallback = false;
};

// Streams: [0] estimate_opt, [1] threshold, [2] ordering.
size_t r_finite_learn_on(const FiniteClass& cls, const LabeledSample& s,
                         const LearnerParams& params, const RandomTape& tape,
                         LearnTrace* trace = nullptr);
size_t r_finite_learn(const FiniteClass& cls, DataSource& data,
                      const LearnerParams& params, const RandomTape& tape,
                      LearnTrace* trace = nullptr);

// A learner over a fixed-size labeled sample, returning a hypothesis index.
struct Learner {
  std::function<size_t(const LabeledSample&, const RandomTape&)> run;
  size_t sample_size = 0;
  size_t class_size = 0;
};

Learner finite_learner(const FiniteClass& cls, const LearnerParams& params);

struct AmplifyConstants {
  double c_k = 1.0;
  double c_t = 1.0 / 16;
  double v_lo = 0.5;
  double v_hi = 0.8;
};

using DataLearner = std::function<size_t(DataSource&, const RandomTape&)>;

// k = ceil(c_k ln(1/rho)) strings tape[0,i]; t = ceil(c_t ln^3(1/rho)/rho^2)
// shared samples; threshold v uniform in [v_lo, v_hi) from tape[1];
// ordering of hypotheses from tape[2]; fallback run on tape[3].
DataLearner amplify_replicability(const Learner& base, double rho_target,
                                  double beta,
                                  const AmplifyConstants& constants = {});

struct SubsetSampler {
  std::function<std::vector<uint32_t>(DataSource&)> generate;
  size_t universe_size = 0;
  size_t max_subset_size = 1;
};

struct HeavyHitterConstants {
  double c_tau = 0.25;
  double c1 = 1.0;
  double c2 = 1.0 / 16;
};

struct HeavyHitterParams {
  size_t t1 = 0;
  size_t t2 = 0;
  size_t grid = 0;  // thresholds eta/4 + 2tau + 4tau*i, i < grid
  double tau = 0;

  static HeavyHitterParams resolve(double eta, double rho, double beta,
                                   size_t max_subset_size,
                                   const HeavyHitterConstants& constants = {});
};

// Streams: [0] threshold, [1] ordering of the universe. Subsets come from
// the data source.
std::optional<uint32_t> list_heavy_hitter(const SubsetSampler& sampler, double eta,
                                          double rho, double beta, DataSource& data,
                                          const RandomTape& tape,
                                          const HeavyHitterConstants& constants = {});

struct ListGeneratorConstants {
  double c_t = 1.0;
  double c_strings = 1.0;
};

std::vector<uint32_t> list_distribution_generator(
    const Learner& learner, const std::vector<RandomTape>& strings,
    const FiniteClass& cls, DataSource& data, double alpha, double beta,
    const ListGeneratorConstants& constants = {});

struct AgnosticConstants {
  LearnerConstants learner;
  ListGeneratorConstants lists;
  HeavyHitterConstants heavy;
};

std::optional<size_t> agnostic_learn(const FiniteClass& cls, DataSource& data,
                                     double rho, double alpha, double beta,
                                     const RandomTape& tape,
                                     const AgnosticConstants& constants = {});

}  // namespace stability

#endif  // STABILITY_LEARNERS_HPP_
