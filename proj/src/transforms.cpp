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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stability/corrsamp.hpp"

namespace stability {
namespace {

// Mass below this is dropped from the exact selection sums.
constexpr double kTailMass = 1e-20;

size_t ceil_count(double v) {
  if (!std::isfinite(v) || v > 1e9) throw std::invalid_argument("parameter overflow");
  return static_cast<size_t>(std::max(1.0, std::ceil(v)));
}

Sample block(const Sample& pooled, size_t b, size_t n) {
  return Sample(pooled.begin() + static_cast<std::ptrdiff_t>(b * n),
                pooled.begin() + static_cast<std::ptrdiff_t>((b + 1) * n));
}

FiniteDistribution from_mass(const std::map<Outcome, double>& mass) {
  std::vector<Outcome> outs;
  std::vector<double> probs;
  for (const auto& [o, p] : mass) {
    outs.push_back(o);
    probs.push_back(p);
  }
  return FiniteDistribution(std::move(outs), std::move(probs));
}

void require_coins(const StatAlgorithm& alg, size_t streams) {
  if (alg.coin_space_size == 0 || !alg.run_with_coin) {
    throw std::invalid_argument("exact distribution needs a finite coin space");
  }
  double tuples = std::pow(static_cast<double>(alg.coin_space_size), static_cast<double>(streams));
  if (tuples > double(1 << 22)) throw std::invalid_argument("coin space too large to enumerate");
}

// All coin tuples of length k over [0, q), in lexicographic order.
template <typename Fn>
void for_each_tuple(uint64_t q, size_t k, Fn&& fn) {
  std::vector<uint64_t> c(k, 0);
  while (true) {
    fn(c);
    size_t i = k;
    while (i > 0) {
      --i;
      if (++c[i] < q) break;
      c[i] = 0;
      if (i == 0) return;
    }
    if (k == 0) return;
  }
}

}  // namespace

StatAlgorithm finite_coin_algorithm(size_t sample_size, std::vector<Outcome> output_space,
                                    uint64_t coin_space_size,
                                    std::function<Outcome(const Sample&, uint64_t)> fn) {
  if (coin_space_size == 0) throw std::invalid_argument("coin space must be non-empty");
  StatAlgorithm a;
  a.sample_size = sample_size;
  a.output_space = std::move(output_space);
  a.coin_space_size = coin_space_size;
  a.run_with_coin = fn;
  a.run = [fn, coin_space_size](const Sample& s, const RandomTape& tape) {
    TapeReader r(tape);
    return fn(s, r.below(coin_space_size));
  };
  a.exact_output_distribution = [fn, coin_space_size](const Sample& s) {
    std::map<Outcome, double> mass;
    double w = 1.0 / static_cast<double>(coin_space_size);
    for (uint64_t c = 0; c < coin_space_size; ++c) mass[fn(s, c)] += w;
    return from_mass(mass);
  };
  return a;
}

void DPParams::validate() const {
  if (!(eps > 0 && eps <= 4)) throw std::invalid_argument("eps must lie in (0, 4]");
  if (!(delta > 0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 0.5)");
}

std::vector<double> exp_mech_probs(const std::vector<double>& scores, double sensitivity,
                                   double eps) {
  if (scores.empty()) throw std::invalid_argument("exp_mech: no candidates");
  if (!(sensitivity > 0)) throw std::invalid_argument("exp_mech: sensitivity must be positive");
  if (!(eps > 0)) throw std::invalid_argument("exp_mech: eps must be positive");
  double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> w(scores.size());
  double total = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp(eps * (scores[i] - top) / (2 * sensitivity));
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

size_t exp_mech_index(const std::vector<double>& scores, double sensitivity, double eps,
                      TapeReader& reader) {
  auto p = exp_mech_probs(scores, sensitivity, eps);
  double u = reader.unit(53);
  double acc = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // Rounding left u above the last partial sum: take the last positive entry.
  for (size_t i = p.size(); i > 0; --i) {
    if (p[i - 1] > 0) return i - 1;
  }
  return p.size() - 1;
}

Outcome exp_mech(const std::vector<Outcome>& candidates, const std::vector<double>& scores,
                 double sensitivity, double eps, const RandomTape& tape) {
  if (candidates.empty()) throw std::invalid_argument("exp_mech: no candidates");
  if (candidates.size() != scores.size()) {
    throw std::invalid_argument("exp_mech: candidates and scores differ in length");
  }
  TapeReader r(tape);
  return candidates[exp_mech_index(scores, sensitivity, eps, r)];
}

int64_t sample_two_sided_geometric(double alpha, TapeReader& reader) {
  double la = std::log(alpha);
  auto geo = [&] {
    double u = static_cast<double>(reader.bits(53) + 1) * 0x1p-53;
    return static_cast<int64_t>(std::floor(std::log(u) / la));
  };
  int64_t a = geo();
  int64_t b = geo();
  return a - b;
}

double two_sided_geometric_cdf(double alpha, int64_t z) {
  if (z >= 0) return 1 - std::pow(alpha, static_cast<double>(z + 1)) / (1 + alpha);
  return std::pow(alpha, static_cast<double>(-z)) / (1 + alpha);
}

int64_t Selection::threshold() const {
  return 1 + static_cast<int64_t>(std::ceil(2 * std::log(2 / delta) / eps));
}

double Selection::alpha() const { return std::exp(-eps / 2); }

Outcome Selection::run(const std::map<Outcome, uint64_t>& counts,
                       const RandomTape& tape) const {
  DPParams{eps, delta}.validate();
  TapeReader r(tape);
  double a = alpha();
  std::optional<int64_t> best;
  const Outcome* winner = nullptr;
  for (const auto& [o, c] : counts) {
    if (c == 0) continue;
    int64_t noisy = static_cast<int64_t>(c) + sample_two_sided_geometric(a, r);
    if (!best || noisy > *best) {
      best = noisy;
      winner = &o;
    }
  }
  if (!winner || *best < threshold()) return kBottom;
  return *winner;
}

FiniteDistribution Selection::distribution(const std::map<Outcome, uint64_t>& counts) const {
  DPParams{eps, delta}.validate();
  double a = alpha();
  int64_t thr = threshold();
  auto span = static_cast<int64_t>(std::ceil(std::log(kTailMass) / std::log(a)));
  std::vector<std::pair<Outcome, int64_t>> cand;
  for (const auto& [o, c] : counts) {
    if (c > 0) cand.emplace_back(o, static_cast<int64_t>(c));
  }
  auto cdf = [&](int64_t center, int64_t v) { return two_sided_geometric_cdf(a, v - center); };
  std::map<Outcome, double> mass;
  double total = 0;
  for (size_t i = 0; i < cand.size(); ++i) {
    int64_t ci = cand[i].second;
    double p = 0;
    for (int64_t v = std::max(thr, ci - span); v <= ci + span; ++v) {
      double pv = cdf(ci, v) - cdf(ci, v - 1);
      for (size_t j = 0; j < cand.size() && pv > 0; ++j) {
        if (j == i) continue;
        pv *= j < i ? cdf(cand[j].second, v - 1) : cdf(cand[j].second, v);
      }
      p += pv;
    }
    if (p > 0) mass[cand[i].first] = p;
    total += p;
  }
  mass[kBottom] = std::max(0.0, 1 - total);
  return from_mass(mass);
}

Outcome dp_selection(const std::vector<Outcome>& items, double eps, double delta,
                     const RandomTape& tape) {
  if (items.empty()) throw std::invalid_argument("dp_selection: empty multiset");
  std::map<Outcome, uint64_t> counts;
  for (const auto& o : items) counts[o]++;
  return Selection{eps, delta}.run(counts, tape);
}

FiniteDistribution dp_selection_distribution(const std::vector<Outcome>& items, double eps,
                                             double delta) {
  if (items.empty()) throw std::invalid_argument("dp_selection: empty multiset");
  std::map<Outcome, uint64_t> counts;
  for (const auto& o : items) counts[o]++;
  return Selection{eps, delta}.distribution(counts);
}

RepToDpParams RepToDpParams::resolve(double eps, double delta, double beta,
                                     const RepToDpConstants& constants) {
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must lie in (0, 1)");
  RepToDpParams p;
  p.dp = {eps, delta};
  p.dp.validate();
  p.k1 = ceil_count(constants.c_k1 * std::log(1 / beta));
  p.k2 = p.k1 * ceil_count(constants.c_k2 * (std::log(1 / delta) / eps + std::log(1 / beta)));
  return p;
}

void RepToDpParams::validate() const {
  dp.validate();
  if (k1 == 0 || k2 == 0) throw std::invalid_argument("k1 and k2 must be positive");
  if (k2 % k1 != 0) throw std::invalid_argument("k2 must be a multiple of k1");
}

Outcome rep_to_dp_on(const StatAlgorithm& alg, const Sample& pooled,
                     const RepToDpParams& params, const RandomTape& tape) {
  params.validate();
  size_t n = alg.sample_size;
  if (pooled.size() != params.k2 * n) {
    throw std::invalid_argument("rep_to_dp: pooled sample must hold k2 * n records");
  }
  size_t per = params.k2 / params.k1;
  std::map<Outcome, uint64_t> counts;
  for (size_t j = 0; j < params.k1; ++j) {
    RandomTape coins = tape.derive({0, j});
    for (size_t i = 0; i < per; ++i) counts[alg.run(block(pooled, j * per + i, n), coins)]++;
  }
  return Selection{params.dp.eps, params.dp.delta}.run(counts, tape.derive(1));
}

Outcome rep_to_dp(const StatAlgorithm& alg, const RepToDpParams& params, DataSource& data,
                  const RandomTape& tape) {
  Sample pooled = data.draw(params.k2 * alg.sample_size);
  return rep_to_dp_on(alg, pooled, params, tape);
}

FiniteDistribution rep_to_dp_distribution(const StatAlgorithm& alg, const Sample& pooled,
                                          const RepToDpParams& params) {
  params.validate();
  require_coins(alg, params.k1);
  size_t n = alg.sample_size;
  if (pooled.size() != params.k2 * n) {
    throw std::invalid_argument("rep_to_dp: pooled sample must hold k2 * n records");
  }
  size_t per = params.k2 / params.k1;
  uint64_t q = alg.coin_space_size;
  // table[b][c]: output of block b under coin c.
  std::vector<std::vector<Outcome>> table(params.k2, std::vector<Outcome>(q));
  for (size_t b = 0; b < params.k2; ++b) {
    Sample s = block(pooled, b, n);
    for (uint64_t c = 0; c < q; ++c) table[b][c] = alg.run_with_coin(s, c);
  }
  Selection sel{params.dp.eps, params.dp.delta};
  std::map<std::map<Outcome, uint64_t>, double> histograms;
  double w = std::pow(static_cast<double>(q), -static_cast<double>(params.k1));
  for_each_tuple(q, params.k1, [&](const std::vector<uint64_t>& coins) {
    std::map<Outcome, uint64_t> counts;
    for (size_t j = 0; j < params.k1; ++j) {
      for (size_t i = 0; i < per; ++i) counts[table[j * per + i][coins[j]]]++;
    }
    histograms[counts] += w;
  });
  std::map<Outcome, double> mass;
  for (const auto& [counts, weight] : histograms) {
    auto d = sel.distribution(counts);
    for (size_t i = 0; i < d.size(); ++i) mass[d.outcomes()[i]] += weight * d.probs()[i];
  }
  return from_mass(mass);
}

RepToPgParams RepToPgParams::resolve(double eps, double delta, double beta,
                                     const RepToPgConstants& constants) {
  RepToPgParams p;
  p.eps = eps;
  p.delta = delta;
  p.beta = beta;
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must lie in (0, 1)");
  DPParams{eps, delta}.validate();
  p.k = ceil_count(constants.c_k * std::log(1 / delta));
  double lb = std::log(1 / beta);
  p.t = ceil_count(constants.c_t * lb * lb * lb * lb * std::max(1.0, std::log(1 / eps)) /
                   (eps * eps));
  return p;
}

double RepToPgParams::sensitivity() const {
  double kt = static_cast<double>(k) * static_cast<double>(t);
  return 4 * std::sqrt(static_cast<double>(t) * std::log(8 * kt / beta));
}

void RepToPgParams::validate() const {
  DPParams{eps, delta}.validate();
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (k == 0 || t == 0) throw std::invalid_argument("k and t must be positive");
}

std::pair<Outcome, uint64_t> plurality(const std::vector<Outcome>& outputs) {
  if (outputs.empty()) throw std::invalid_argument("plurality: no outputs");
  std::map<Outcome, uint64_t> counts;
  for (const auto& o : outputs) counts[o]++;
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return *best;
}

Outcome rep_to_pg_on(const StatAlgorithm& alg, const Sample& pooled,
                     const RepToPgParams& params, const RandomTape& tape) {
  params.validate();
  size_t n = alg.sample_size;
  if (pooled.size() != params.k * params.t * n) {
    throw std::invalid_argument("rep_to_pg: pooled sample must hold k * t * n records");
  }
  std::vector<Outcome> cands;
  std::vector<double> scores;
  for (size_t j = 0; j < params.k; ++j) {
    RandomTape coins = tape.derive({0, j});
    std::vector<Outcome> z;
    for (size_t i = 0; i < params.t; ++i) z.push_back(alg.run(block(pooled, j * params.t + i, n), coins));
    auto [c, score] = plurality(z);
    cands.push_back(c);
    scores.push_back(static_cast<double>(score));
  }
  return exp_mech(cands, scores, params.sensitivity(), params.eps, tape.derive(1));
}

Outcome rep_to_pg(const StatAlgorithm& alg, const RepToPgParams& params, DataSource& data,
                  const RandomTape& tape) {
  Sample pooled = data.draw(params.k * params.t * alg.sample_size);
  return rep_to_pg_on(alg, pooled, params, tape);
}

FiniteDistribution rep_to_pg_distribution(const StatAlgorithm& alg, const Sample& pooled,
                                          const RepToPgParams& params) {
  params.validate();
  require_coins(alg, params.k);
  size_t n = alg.sample_size;
  if (pooled.size() != params.k * params.t * n) {
    throw std::invalid_argument("rep_to_pg: pooled sample must hold k * t * n records");
  }
  uint64_t q = alg.coin_space_size;
  std::vector<std::vector<std::pair<Outcome, uint64_t>>> stage(params.k);
  for (size_t j = 0; j < params.k; ++j) {
    for (uint64_t c = 0; c < q; ++c) {
      std::vector<Outcome> z;
      for (size_t i = 0; i < params.t; ++i) {
        z.push_back(alg.run_with_coin(block(pooled, j * params.t + i, n), c));
      }
      stage[j].push_back(plurality(z));
    }
  }
  double sens = params.sensitivity();
  double w = std::pow(static_cast<double>(q), -static_cast<double>(params.k));
  std::map<Outcome, double> mass;
  std::vector<double> scores(params.k);
  for_each_tuple(q, params.k, [&](const std::vector<uint64_t>& coins) {
    for (size_t j = 0; j < params.k; ++j) scores[j] = static_cast<double>(stage[j][coins[j]].second);
    auto p = exp_mech_probs(scores, sens, params.eps);
    for (size_t j = 0; j < params.k; ++j) mass[stage[j][coins[j]].first] += w * p[j];
  });
  return from_mass(mass);
}

DpToRepResult dp_to_rep(const StatAlgorithm& alg, const Sample& sample,
                        const RandomTape& tape, uint64_t fallback_runs) {
  if (alg.output_space.empty()) throw std::invalid_argument("dp_to_rep: empty output space");
  DpToRepResult res;
  FiniteDistribution q;
  if (alg.exact_output_distribution) {
    q = alg.exact_output_distribution(sample);
  } else if (fallback_runs > 0) {
    EmpiricalDistribution e;
    for (uint64_t l = 0; l < fallback_runs; ++l) e.add(alg.run(sample, tape.derive({1, l})));
    q = normalize(e);
    res.approximate = true;
  } else {
    throw std::invalid_argument("dp_to_rep: no exact output distribution and fallback disabled");
  }
  res.output = consistent_sample(align(q, alg.output_space), tape.derive(0));
  return res;
}

SubsampleResult subsample_amplify(const StatAlgorithm& alg, size_t m, double eps,
                                  double delta) {
  size_t n = alg.sample_size;
  if (m < n) throw std::invalid_argument("subsample_amplify: m must be at least n");
  SubsampleResult r;
  double frac = static_cast<double>(n) / static_cast<double>(m);
  r.eps = frac * (std::exp(eps) - 1);
  r.delta = frac * delta;
  if (m == n) {
    r.alg = alg;
    return r;
  }
  r.alg.sample_size = m;
  r.alg.output_space = alg.output_space;
  r.alg.run = [alg, m, n](const Sample& s, const RandomTape& tape) {
    if (s.size() != m) throw std::invalid_argument("subsample_amplify: wrong sample size");
    TapeReader reader(tape.derive(0));
    auto perm = random_permutation(m, reader);
    Sample sub(n);
    for (size_t i = 0; i < n; ++i) sub[i] = s[perm[i]];
    return alg.run(sub, tape.derive(1));
  };
  return r;
}

std::vector<double> dp_exp_mech_learner_probs(const FiniteClass& cls, double eps,
                                              const LabeledSample& s) {
  if (s.empty()) throw std::invalid_argument("dp_exp_mech_learner: empty sample");
  auto m = mistake_counts(cls, s);
  std::vector<double> scores(m.size());
  for (size_t h = 0; h < m.size(); ++h) scores[h] = -static_cast<double>(m[h]);
  return exp_mech_probs(scores, 1.0, eps);
}

size_t dp_exp_mech_learner(const FiniteClass& cls, double eps, const LabeledSample& s,
                           const RandomTape& tape) {
  if (s.empty()) throw std::invalid_argument("dp_exp_mech_learner: empty sample");
  auto m = mistake_counts(cls, s);
  std::vector<double> scores(m.size());
  for (size_t h = 0; h < m.size(); ++h) scores[h] = -static_cast<double>(m[h]);
  TapeReader r(tape);
  return exp_mech_index(scores, 1.0, eps, r);
}

StatAlgorithm exp_mech_learner_algorithm(const FiniteClass& cls, double eps, size_t n) {
  StatAlgorithm a;
  a.sample_size = n;
  for (size_t h = 0; h < cls.size(); ++h) a.output_space.push_back(outcome_from_u64(h));
  a.run = [cls, eps](const Sample& s, const RandomTape& tape) {
    return outcome_from_u64(dp_exp_mech_learner(cls, eps, to_labeled(s), tape));
  };
  a.exact_output_distribution = [cls, eps, out = a.output_space](const Sample& s) {
    return FiniteDistribution(out, dp_exp_mech_learner_probs(cls, eps, to_labeled(s)));
  };
  return a;
}

}  // namespace stability
