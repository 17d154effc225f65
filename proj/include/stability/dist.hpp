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

#ifndef STABILITY_DIST_HPP_
#define STABILITY_DIST_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stability/rand.hpp"

namespace stability {

// Outcomes are opaque byte strings. The empty string is reserved for the
// "no output" symbol.
using Outcome = std::string;
inline const Outcome kBottom{};

Outcome outcome_from_u64(uint64_t v);
// Big-endian decode; requires size <= 8.
uint64_t outcome_to_u64(const Outcome& o);
std::string outcome_hex(const Outcome& o);
Outcome outcome_from_hex(std::string_view hex);

constexpr double kProbTolerance = 0x1p-40;

class FiniteDistribution {
 public:
  FiniteDistribution() = default;
  FiniteDistribution(std::vector<Outcome> outcomes, std::vector<double> probs);

  static FiniteDistribution point_mass(const Outcome& o);
  static FiniteDistribution uniform(std::vector<Outcome> outcomes);

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const std::vector<double>& probs() const { return probs_; }
  size_t size() const { return outcomes_.size(); }
  double prob(const Outcome& o) const;
  std::optional<size_t> index_of(const Outcome& o) const;

 private:
  std::vector<Outcome> outcomes_;
  std::vector<double> probs_;
  std::unordered_map<Outcome, size_t> index_;
};

struct EmpiricalDistribution {
  std::map<Outcome, uint64_t> counts;
  uint64_t total = 0;

  void add(const Outcome& o, uint64_t n = 1) {
    counts[o] += n;
    total += n;
  }
};

double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q);
// Worst-event check of P ~(eps,delta) Q in both directions.
bool indistinguishable(const FiniteDistribution& p, const FiniteDistribution& q,
                       double eps, double delta);
// max over events O of P(O) - e^eps Q(O).
double privacy_loss_excess(const FiniteDistribution& p,
                           const FiniteDistribution& q, double eps);

// p re-listed over `universe` (zero mass for missing outcomes). Every
// outcome of p with positive mass must appear in the universe.
FiniteDistribution align(const FiniteDistribution& p,
                         const std::vector<Outcome>& universe);

EmpiricalDistribution empirical(std::span<const Outcome> samples);
FiniteDistribution normalize(const EmpiricalDistribution& e);

std::string distribution_to_json(const FiniteDistribution& p);
FiniteDistribution distribution_from_json(std::string_view text);

// Sample records: data points are 64-bit values decoded from outcomes.
using Record = uint64_t;
using Sample = std::vector<Record>;

// Inverse-CDF sampler over a FiniteDistribution whose outcomes decode as
// records.
class DataSampler {
 public:
  explicit DataSampler(FiniteDistribution dist);

  Record draw(TapeReader& reader) const;
  Sample draw(size_t n, TapeReader& reader) const;
  const FiniteDistribution& dist() const { return dist_; }
  const std::vector<Record>& records() const { return records_; }

 private:
  FiniteDistribution dist_;
  std::vector<Record> records_;
  std::vector<double> cdf_;
};

// Fresh i.i.d. data drawn from a sampler with its own randomness. Kept
// separate from the algorithm's coin tape.
class DataSource {
 public:
  DataSource(const DataSampler& sampler, const RandomTape& data_tape)
      : sampler_(&sampler), reader_(data_tape) {}

  Sample draw(size_t n) { return sampler_->draw(n, reader_); }
  Record draw_one() { return sampler_->draw(reader_); }
  TapeReader& reader() { return reader_; }
  const DataSampler& sampler() const { return *sampler_; }

 private:
  const DataSampler* sampler_;
  TapeReader reader_;
};

struct Estimate {
  double value = 0;
  double half_width = 0;
  uint64_t trials = 0;
};

// 95% Wald half-width for a rate p over n trials.
double wald_half_width(double p, uint64_t n);

// Fraction of t in [0, trials) with event(t) true, run in parallel.
Estimate estimate_rate(uint64_t trials,
                       const std::function<bool(uint64_t)>& event);

using SampleAlgorithm =
    std::function<Outcome(const Sample& sample, const RandomTape& coins)>;

// Trial t uses coins tape[t,0] and samples from tape[t,1], tape[t,2].
Estimate estimate_replicability(const SampleAlgorithm& alg,
                                const FiniteDistribution& data_dist, size_t n,
                                uint64_t trials, const RandomTape& tape);

// Pearson goodness-of-fit p-value. Bins with expected count below 5 are
// pooled.
double chi_square_p_value(std::span<const uint64_t> observed,
                          std::span<const double> probs);

}  // namespace stability

#endif  // STABILITY_DIST_HPP_
