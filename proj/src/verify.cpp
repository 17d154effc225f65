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

#include "stability/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stability/corrsamp.hpp"
#include "stability/crypto.hpp"
#include "stability/hashing.hpp"
#include "stability/parallel.hpp"
#include "stability/rational.hpp"

namespace stability {
namespace {

Metric metric(std::string name, double value, Cmp cmp, double tolerance, double hw = 0) {
  return Metric{std::move(name), value, cmp, tolerance, hw};
}

// Empirical TV to a target, with kBottom counted as an outcome outside it.
double empirical_tv(const std::vector<std::optional<uint64_t>>& outs,
                    const FiniteDistribution& target) {
  std::map<Outcome, double> freq;
  for (const auto& o : outs) freq[o ? circuit_outcome(*o) : kBottom] += 1;
  auto n = static_cast<double>(outs.size());
  double sum = 0;
  for (size_t i = 0; i < target.size(); ++i) {
    auto it = freq.find(target.outcomes()[i]);
    double ph = it == freq.end() ? 0 : it->second / n;
    sum += std::abs(ph - target.probs()[i]);
    if (it != freq.end()) freq.erase(it);
  }
  for (const auto& [o, c] : freq) sum += c / n;
  return sum / 2;
}

// A DataSource whose records are unused; subset samplers read its tape.
const DataSampler& unit_sampler() {
  static const DataSampler s(FiniteDistribution::point_mass(outcome_from_u64(0)));
  return s;
}

std::vector<Outcome> outcome_range(uint64_t n) {
  std::vector<Outcome> out;
  for (uint64_t i = 0; i < n; ++i) out.push_back(outcome_from_u64(i));
  return out;
}

}  // namespace

bool CheckResult::pass() const {
  return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass(); });
}

TruthTableCircuit random_circuit(unsigned in_bits, unsigned out_bits, TapeReader& reader) {
  std::vector<uint64_t> table(size_t{1} << in_bits);
  for (auto& v : table) v = reader.bits(out_bits);
  return TruthTableCircuit(in_bits, out_bits, std::move(table));
}

CheckResult check_pairwise_independence(unsigned max_in, unsigned max_out) {
  CheckResult res;
  int64_t worst = 0;
  uint64_t cells = 0;
  for (unsigned in = 2; in <= max_in; ++in) {
    for (unsigned out = 1; out <= max_out; ++out) {
      unsigned width = in * out + out;
      uint64_t members = uint64_t{1} << width;
      size_t xs = size_t{1} << in, ys = size_t{1} << out;
      std::vector<uint64_t> hits(xs * xs * ys * ys, 0);
      for (uint64_t idx = 0; idx < members; ++idx) {
        std::vector<uint64_t> cols(in);
        for (unsigned j = 0; j < in; ++j) cols[j] = (idx >> (j * out)) & low_mask(out);
        GF2AffineHash h(in, out, cols, idx >> (in * out));
        std::vector<uint64_t> img(xs);
        for (size_t x = 0; x < xs; ++x) img[x] = h.apply(x);
        for (size_t a = 0; a < xs; ++a) {
          for (size_t b = 0; b < xs; ++b) {
            if (a != b) hits[((a * xs + b) * ys + img[a]) * ys + img[b]]++;
          }
        }
      }
      // Exact: every pair and target pair is hit by members / 2^(2 out).
      uint64_t expect = members >> (2 * out);
      for (size_t a = 0; a < xs; ++a) {
        for (size_t b = 0; b < xs; ++b) {
          if (a == b) continue;
          for (size_t y = 0; y < ys * ys; ++y) {
            auto dev = static_cast<int64_t>(hits[(a * xs + b) * ys * ys + y]) -
                       static_cast<int64_t>(expect);
            worst = std::max(worst, std::abs(dev));
            ++cells;
          }
        }
      }
    }
  }
  res.metrics.push_back(metric("max_count_deviation", static_cast<double>(worst), Cmp::kLessEq, 0));
  res.constants["cells_checked"] = static_cast<double>(cells);
  return res;
}

CheckResult check_consistent_sampler(
    const ConsistentSamplerCheck& cfg, const RandomTape& tape,
    const std::vector<std::pair<FiniteDistribution, FiniteDistribution>>& explicit_pairs) {
  std::vector<std::pair<FiniteDistribution, FiniteDistribution>> pairs = explicit_pairs;
  if (pairs.empty()) {
    for (size_t i = 0; i < cfg.pairs; ++i) {
      TapeReader r(tape.derive({0, i}));
      size_t s = 8 + r.below(cfg.max_support - 7);
      std::vector<double> p(s);
      for (double& v : p) v = 0.01 + r.unit();
      double total = std::accumulate(p.begin(), p.end(), 0.0);
      for (double& v : p) v /= total;
      size_t low = static_cast<size_t>(std::min_element(p.begin(), p.end()) - p.begin());
      double target = cfg.tv_lo + (cfg.tv_hi - cfg.tv_lo) * r.unit();
      double lambda = target / (1 - p[low]);
      std::vector<double> q(s);
      for (size_t j = 0; j < s; ++j) q[j] = (1 - lambda) * p[j] + (j == low ? lambda : 0);
      pairs.emplace_back(FiniteDistribution(outcome_range(s), p),
                         FiniteDistribution(outcome_range(s), q));
    }
  }
  CheckResult res;
  double worst_excess = -1, min_p = 1, worst_rate = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& [p, q] = pairs[i];
    if (p.outcomes() != q.outcomes()) {
      throw std::invalid_argument("consistent sampler check: pair must share an outcome list");
    }
    std::vector<uint32_t> a(cfg.tapes), b(cfg.tapes);
    parallel_for(cfg.tapes, [&](uint64_t t) {
      RandomTape shared = tape.derive({1, i, t});
      a[t] = static_cast<uint32_t>(*p.index_of(consistent_sample(p, shared)));
      b[t] = static_cast<uint32_t>(*q.index_of(consistent_sample(q, shared)));
    });
    uint64_t differ = 0;
    std::vector<uint64_t> ca(p.size(), 0), cb(q.size(), 0);
    for (uint64_t t = 0; t < cfg.tapes; ++t) {
      differ += a[t] != b[t];
      ca[a[t]]++;
      cb[b[t]]++;
    }
    double tv = tv_distance(p, q);
    double rate = static_cast<double>(differ) / static_cast<double>(cfg.tapes);
    double hw = wald_half_width(rate, cfg.tapes);
    double bound = 2 * tv / (1 + tv) + 3 * hw;
    worst_excess = std::max(worst_excess, rate - bound);
    worst_rate = std::max(worst_rate, rate);
    min_p = std::min({min_p, chi_square_p_value(ca, p.probs()), chi_square_p_value(cb, q.probs())});
  }
  res.metrics.push_back(metric("disagreement_minus_bound", worst_excess, Cmp::kLessEq, 0));
  res.metrics.push_back(metric("min_marginal_chi2_p", min_p, Cmp::kGreaterEq, cfg.chi2_alpha));
  res.constants["pairs"] = static_cast<double>(pairs.size());
  res.constants["tapes"] = static_cast<double>(cfg.tapes);
  res.notes["max_disagreement"] = std::to_string(worst_rate);
  return res;
}

CheckResult check_corrsamp_accuracy(const CorrSampCheck& cfg, const RandomTape& tape,
                                    const std::vector<TruthTableCircuit>& fixed) {
  std::vector<TruthTableCircuit> circuits = fixed;
  for (size_t i = 0; fixed.empty() && i < cfg.circuits; ++i) {
    TapeReader r(tape.derive({0, i}));
    circuits.push_back(random_circuit(cfg.m, cfg.n, r));
  }
  if (circuits.empty()) throw std::invalid_argument("corrsamp check: no circuits");
  uint64_t per = std::max<uint64_t>(1, cfg.runs / circuits.size());
  CheckResult res;
  double worst_tv = 0, worst_bot = 0;
  CorrSampParams params;
  for (size_t i = 0; i < circuits.size(); ++i) {
    const auto& c = circuits[i];
    params = CorrSampParams::resolve(c.in_bits(), cfg.nu, cfg.constants);
    CorrSampler sampler(c, params);
    std::vector<std::optional<uint64_t>> outs(per);
    parallel_for(per, [&](uint64_t r) { outs[r] = sampler.sample(tape.derive({1, i, r})); });
    uint64_t bot = std::count(outs.begin(), outs.end(), std::nullopt);
    worst_bot = std::max(worst_bot, static_cast<double>(bot) / static_cast<double>(per));
    worst_tv = std::max(worst_tv, empirical_tv(outs, induced_distribution(c)));
  }
  res.metrics.push_back(metric("tv_to_target", worst_tv, Cmp::kLessEq, 5 * cfg.nu));
  res.metrics.push_back(metric("bot_rate", worst_bot, Cmp::kLessEq, 5 * cfg.nu,
                               wald_half_width(worst_bot, per)));
  res.constants["k"] = params.k;
  res.constants["T1"] = static_cast<double>(params.T1);
  res.constants["T2"] = static_cast<double>(params.T2);
  res.constants["c0"] = cfg.constants.c0;
  res.constants["c1"] = cfg.constants.c1;
  res.constants["c2"] = cfg.constants.c2;
  res.constants["runs_per_circuit"] = static_cast<double>(per);
  res.constants["circuits"] = static_cast<double>(circuits.size());
  return res;
}

CheckResult check_corrsamp_correlation(
    const CorrSampPairCheck& cfg, const RandomTape& tape,
    const std::vector<std::pair<TruthTableCircuit, TruthTableCircuit>>& fixed) {
  auto pairs = fixed;
  if (pairs.empty()) {
    auto max_changes = static_cast<uint64_t>(std::floor(cfg.max_tv * std::ldexp(1.0, cfg.m)));
    for (size_t i = 0; i < cfg.pairs; ++i) {
      TapeReader r(tape.derive({0, i}));
      TruthTableCircuit c1 = random_circuit(cfg.m, cfg.n, r);
      auto table = c1.table();
      uint64_t changes = max_changes == 0 ? 0 : 1 + r.below(max_changes);
      for (uint64_t j = 0; j < changes; ++j) {
        uint64_t at = r.below(table.size());
        table[at] ^= 1 + r.below(low_mask(cfg.n));
      }
      pairs.emplace_back(c1, TruthTableCircuit(cfg.m, cfg.n, table));
    }
  }
  CheckResult res;
  double worst_excess = -1, worst_tv = 0, worst_rate = 0;
  CorrSampParams params;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& [c1, c2] = pairs[i];
    if (c1.in_bits() != c2.in_bits()) throw std::invalid_argument("circuit pair input widths differ");
    params = CorrSampParams::resolve(c1.in_bits(), cfg.nu, cfg.constants);
    CorrSampler s1(c1, params), s2(c2, params);
    std::vector<uint8_t> differ(cfg.tapes);
    parallel_for(cfg.tapes, [&](uint64_t t) {
      auto outs = sample_jointly({&s1, &s2}, tape.derive({1, i, t}));
      differ[t] = outs[0] != outs[1];
    });
    double tv = tv_distance(induced_distribution(c1), induced_distribution(c2));
    uint64_t d = std::count(differ.begin(), differ.end(), 1);
    double rate = static_cast<double>(d) / static_cast<double>(cfg.tapes);
    double hw = wald_half_width(rate, cfg.tapes);
    worst_excess = std::max(worst_excess, rate - (8 * (tv + cfg.nu) + 3 * hw));
    worst_tv = std::max(worst_tv, tv);
    worst_rate = std::max(worst_rate, rate);
  }
  res.metrics.push_back(metric("disagreement_minus_bound", worst_excess, Cmp::kLessEq, 0));
  res.metrics.push_back(metric("max_pair_tv", worst_tv, Cmp::kLessEq, cfg.max_tv));
  res.constants["T2"] = static_cast<double>(params.T2);
  res.constants["tapes"] = static_cast<double>(cfg.tapes);
  res.notes["max_disagreement"] = std::to_string(worst_rate);
  return res;
}

FiniteClass graded_class(size_t hypotheses, size_t domain) {
  if (hypotheses == 0 || hypotheses > domain + 1) {
    throw std::invalid_argument("graded_class: need 1 <= |H| <= D + 1");
  }
  std::vector<std::vector<uint8_t>> hs;
  for (size_t i = 0; i < hypotheses; ++i) {
    std::vector<uint8_t> h(domain);
    for (size_t x = 0; x < domain; ++x) h[x] = ((x * 7) % 3 == 0) ^ (x < i);
    hs.push_back(h);
  }
  return FiniteClass(domain, hs);
}

FiniteDistribution realizable_distribution(const FiniteClass& cls, size_t h) {
  std::vector<Outcome> o;
  std::vector<double> p;
  for (size_t x = 0; x < cls.domain_size(); ++x) {
    o.push_back(outcome_from_u64(labeled_record(static_cast<uint32_t>(x), cls.label(h, x))));
    p.push_back(1.0 / static_cast<double>(cls.domain_size()));
  }
  return FiniteDistribution(o, p);
}

CheckResult check_finite_learner(const LearnerCheck& cfg, const FiniteClass& cls,
                                 const FiniteDistribution& data, const RandomTape& tape) {
  double opt = optimal_risk(cls, data);
  bool realizable = opt == 0;
  auto params = LearnerParams::resolve(cfg.rho, cfg.alpha, cfg.beta, realizable, cls.size(),
                                       cfg.constants);
  DataSampler sampler(data);
  std::vector<uint8_t> same(cfg.trials), good(2 * cfg.trials);
  std::vector<size_t> first(cfg.trials);
  parallel_for(cfg.trials, [&](uint64_t t) {
    RandomTape coins = tape.derive({t, 0});
    DataSource d1(sampler, tape.derive({t, 1})), d2(sampler, tape.derive({t, 2}));
    size_t h1 = r_finite_learn(cls, d1, params, coins);
    size_t h2 = r_finite_learn(cls, d2, params, coins);
    same[t] = h1 == h2;
    good[2 * t] = true_risk(cls, h1, data) <= opt + cfg.alpha;
    good[2 * t + 1] = true_risk(cls, h2, data) <= opt + cfg.alpha;
    first[t] = h1;
  });
  double rep = static_cast<double>(std::count(same.begin(), same.end(), 1)) /
               static_cast<double>(cfg.trials);
  double acc = static_cast<double>(std::count(good.begin(), good.end(), 1)) /
               static_cast<double>(good.size());
  double hw = wald_half_width(rep, cfg.trials);
  CheckResult res;
  res.metrics.push_back(metric("measured_replicability", rep, Cmp::kGreaterEq,
                               1 - cfg.rho - 3 * hw, hw));
  res.metrics.push_back(metric("within_alpha_rate", acc, Cmp::kGreaterEq, 1 - cfg.beta,
                               wald_half_width(acc, good.size())));
  res.constants["m"] = static_cast<double>(params.m);
  res.constants["tau"] = params.tau.to_double();
  res.constants["thresholds"] = static_cast<double>(params.threshold_count());
  res.constants["c_tau"] = params.constants.c_tau;
  res.constants["c_m"] = params.constants.c_m;
  res.constants["trials"] = static_cast<double>(cfg.trials);
  res.notes["output"] = cls.row(first.empty() ? 0 : first[0]);
  res.notes["opt"] = std::to_string(opt);
  return res;
}

CheckResult check_random_ordering(unsigned universe) {
  if (universe == 0 || universe > 8) throw std::invalid_argument("random ordering: universe in [1, 8]");
  std::vector<std::vector<unsigned>> perms;
  std::vector<unsigned> order(universe);
  std::iota(order.begin(), order.end(), 0u);
  do {
    perms.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  uint64_t sets = 1u << universe, mismatches = 0, checked = 0;
  for (uint64_t h1 = 0; h1 < sets; ++h1) {
    for (uint64_t h2 = 0; h2 < sets; ++h2) {
      if ((h1 | h2) == 0) continue;
      uint64_t differ = 0;
      for (const auto& p : perms) {
        int f1 = -1, f2 = -1;
        for (unsigned e : p) {
          if (f1 < 0 && (h1 >> e & 1)) f1 = static_cast<int>(e);
          if (f2 < 0 && (h2 >> e & 1)) f2 = static_cast<int>(e);
        }
        differ += f1 != f2;
      }
      auto uni = static_cast<uint64_t>(__builtin_popcountll(h1 | h2));
      auto sym = static_cast<uint64_t>(__builtin_popcountll(h1 ^ h2));
      if (differ * uni != perms.size() * sym) ++mismatches;
      ++checked;
    }
  }
  CheckResult res;
  res.metrics.push_back(metric("identity_mismatches", static_cast<double>(mismatches), Cmp::kLessEq, 0));
  res.constants["set_pairs"] = static_cast<double>(checked);
  res.constants["permutations"] = static_cast<double>(perms.size());
  return res;
}

StatAlgorithm toy_selection_algorithm(size_t n) {
  return finite_coin_algorithm(n, outcome_range(3), 4, [n](const Sample& s, uint64_t c) {
    return outcome_from_u64(s[c % n] % 3);
  });
}

CheckResult check_rep_to_dp(const RepToDpCheck& cfg, const RandomTape& tape) {
  struct Shape {
    size_t n, k1, k2;
  };
  const Shape shapes[] = {{1, 2, 4}, {2, 2, 4}, {1, 2, 8}, {1, 4, 8}};
  std::vector<Outcome> universe = outcome_range(3);
  universe.insert(universe.begin(), kBottom);
  double worst = 0;
  uint64_t neighbor_pairs = 0;
  for (const auto& sh : shapes) {
    StatAlgorithm alg = toy_selection_algorithm(sh.n);
    RepToDpParams params;
    params.k1 = sh.k1;
    params.k2 = sh.k2;
    params.dp = {cfg.eps, cfg.delta};
    size_t len = sh.n * sh.k2;
    uint64_t count = 1;
    for (size_t i = 0; i < len; ++i) count *= 3;
    auto decode = [len](uint64_t code) {
      Sample s(len);
      for (size_t i = 0; i < len; ++i, code /= 3) s[i] = code % 3;
      return s;
    };
    std::vector<FiniteDistribution> dists(count);
    parallel_for(count, [&](uint64_t code) {
      dists[code] = align(rep_to_dp_distribution(alg, decode(code), params), universe);
    });
    std::vector<double> local(count, 0);
    parallel_for(count, [&](uint64_t code) {
      uint64_t stride = 1;
      double w = 0;
      for (size_t i = 0; i < len; ++i, stride *= 3) {
        uint64_t digit = code / stride % 3;
        for (uint64_t v = digit + 1; v < 3; ++v) {
          uint64_t other = code + (v - digit) * stride;
          w = std::max({w, privacy_loss_excess(dists[code], dists[other], cfg.eps),
                        privacy_loss_excess(dists[other], dists[code], cfg.eps)});
        }
      }
      local[code] = w;
    });
    worst = std::max(worst, *std::max_element(local.begin(), local.end()));
    neighbor_pairs += count * len;  // each unordered pair counted from its lower code
  }
  CheckResult res;
  res.metrics.push_back(metric("max_privacy_excess", worst, Cmp::kLessEq, cfg.delta));
  res.constants["eps"] = cfg.eps;
  res.constants["delta"] = cfg.delta;
  res.constants["selection_threshold"] =
      static_cast<double>(Selection{cfg.eps, cfg.delta}.threshold());
  res.constants["neighbor_pairs"] = static_cast<double>(neighbor_pairs);

  if (cfg.trials > 0) {
    // Majority of 15 records from Bernoulli(0.8); correct output is 1.
    StatAlgorithm maj = finite_coin_algorithm(15, outcome_range(2), 1, [](const Sample& s, uint64_t) {
      uint64_t ones = std::count(s.begin(), s.end(), Record{1});
      return outcome_from_u64(2 * ones > s.size() ? 1 : 0);
    });
    auto params = RepToDpParams::resolve(cfg.eps, cfg.delta, cfg.beta, cfg.constants);
    DataSampler bern(FiniteDistribution(outcome_range(2), {0.2, 0.8}));
    std::vector<uint8_t> fail(cfg.trials);
    parallel_for(cfg.trials, [&](uint64_t t) {
      DataSource d(bern, tape.derive({1, t, 1}));
      fail[t] = rep_to_dp(maj, params, d, tape.derive({1, t, 0})) != outcome_from_u64(1);
    });
    double rate = static_cast<double>(std::count(fail.begin(), fail.end(), 1)) /
                  static_cast<double>(cfg.trials);
    double hw = wald_half_width(rate, cfg.trials);
    res.metrics.push_back(metric("failure_rate", rate, Cmp::kLessEq,
                                 cfg.constants.c_fail * cfg.beta * std::log(1 / cfg.beta) + hw,
                                 hw));
    res.constants["k1"] = static_cast<double>(params.k1);
    res.constants["k2"] = static_cast<double>(params.k2);
    res.constants["c_k1"] = cfg.constants.c_k1;
    res.constants["c_k2"] = cfg.constants.c_k2;
    res.constants["c_fail"] = cfg.constants.c_fail;
  }
  return res;
}

StatAlgorithm threshold_algorithm(size_t n) {
  return finite_coin_algorithm(n, outcome_range(2), 16, [](const Sample& s, uint64_t c) {
    uint64_t ones = std::count(s.begin(), s.end(), Record{1});
    return outcome_from_u64(32 * ones >= (2 * c + 1) * s.size() ? 1 : 0);
  });
}

CheckResult check_rep_to_pg(const RepToPgCheck& cfg, const RandomTape& tape) {
  StatAlgorithm alg = threshold_algorithm(cfg.n);
  RepToPgParams params;
  params.k = cfg.k;
  params.t = cfg.t;
  params.eps = cfg.eps;
  params.delta = cfg.delta;
  params.beta = cfg.beta;
  params.validate();
  DataSampler bern(FiniteDistribution(outcome_range(2), {1 - cfg.bias, cfg.bias}));
  double slack = 2 * cfg.delta + 0.05;
  std::vector<uint8_t> bad(cfg.pairs);
  size_t pooled = cfg.k * cfg.t * cfg.n;
  parallel_for(cfg.pairs, [&](uint64_t i) {
    TapeReader r1(tape.derive({i, 0})), r2(tape.derive({i, 1}));
    auto p = align(rep_to_pg_distribution(alg, bern.draw(pooled, r1), params), alg.output_space);
    auto q = align(rep_to_pg_distribution(alg, bern.draw(pooled, r2), params), alg.output_space);
    bad[i] = !indistinguishable(p, q, cfg.eps, slack);
  });
  double rate = static_cast<double>(std::count(bad.begin(), bad.end(), 1)) /
                static_cast<double>(cfg.pairs);
  CheckResult res;
  res.metrics.push_back(metric("pg_violation_rate", rate, Cmp::kLessEq, slack,
                               wald_half_width(rate, cfg.pairs)));
  res.constants["k"] = static_cast<double>(cfg.k);
  res.constants["t"] = static_cast<double>(cfg.t);
  res.constants["sensitivity"] = params.sensitivity();
  res.constants["eps"] = cfg.eps;
  res.constants["delta"] = cfg.delta;
  res.constants["pairs"] = static_cast<double>(cfg.pairs);
  return res;
}

CheckResult check_dp_to_rep(const DpToRepCheck& cfg, const RandomTape& tape) {
  FiniteClass cls = graded_class(8, 16);
  FiniteDistribution data = realizable_distribution(cls, 0);
  DataSampler sampler(data);
  double m = static_cast<double>(cfg.sample_size);
  double eps = cfg.rho / std::sqrt(8 * m * std::log(1 / cfg.rho));
  StatAlgorithm alg = exp_mech_learner_algorithm(cls, eps, cfg.sample_size);

  TapeReader sr(tape.derive(0));
  Sample fixed = sampler.draw(cfg.sample_size, sr);
  FiniteDistribution exact = align(alg.exact_output_distribution(fixed), alg.output_space);
  std::vector<uint32_t> outs(cfg.runs);
  parallel_for(cfg.runs, [&](uint64_t r) {
    auto o = dp_to_rep(alg, fixed, tape.derive({1, r})).output;
    outs[r] = static_cast<uint32_t>(outcome_to_u64(o));
  });
  std::vector<double> freq(cls.size(), 0);
  for (uint32_t o : outs) freq[o] += 1.0 / static_cast<double>(cfg.runs);
  double tv = 0;
  for (size_t h = 0; h < cls.size(); ++h) tv += std::abs(freq[h] - exact.probs()[h]) / 2;

  std::vector<uint8_t> same(cfg.pairs);
  parallel_for(cfg.pairs, [&](uint64_t t) {
    TapeReader r1(tape.derive({2, t, 1})), r2(tape.derive({2, t, 2}));
    RandomTape shared = tape.derive({2, t, 0});
    same[t] = dp_to_rep(alg, sampler.draw(cfg.sample_size, r1), shared).output ==
              dp_to_rep(alg, sampler.draw(cfg.sample_size, r2), shared).output;
  });
  double rep = static_cast<double>(std::count(same.begin(), same.end(), 1)) /
               static_cast<double>(cfg.pairs);
  double hw = wald_half_width(rep, cfg.pairs);
  CheckResult res;
  res.metrics.push_back(metric("marginal_tv", tv, Cmp::kLessEq, 0.01));
  res.metrics.push_back(metric("measured_replicability", rep, Cmp::kGreaterEq,
                               1 - 8 * cfg.rho - 3 * hw, hw));
  res.constants["eps"] = eps;
  res.constants["m"] = m;
  res.constants["rho"] = cfg.rho;
  res.constants["class_size"] = static_cast<double>(cls.size());
  return res;
}

CheckResult check_dp_rand_enc(const DPRandEncCheck& cfg, const RandomTape& tape) {
  GMKeys keys = GMKeys::from_primes(cfg.p, cfg.q, tape.derive(0));
  const auto& pk = keys.pk;
  uint64_t k = dp_rand_enc_pads(cfg.eps);
  GMCiphertext zero = enc(pk, 0, tape.derive(1));
  GMCiphertext one = enc(pk, 1, tape.derive(2));
  GMCiphertext invalid{mpz_class(cfg.p)};
  size_t m = cfg.m;

  auto build = [&](size_t a, size_t b) {
    std::vector<GMCiphertext> s(a, zero);
    s.insert(s.end(), b, one);
    s.insert(s.end(), m - a - b, invalid);
    return s;
  };
  std::map<std::pair<size_t, size_t>, FiniteDistribution> dists;
  for (size_t a = 0; a <= m; ++a) {
    for (size_t b = 0; a + b <= m; ++b) {
      dists[{a, b}] = dp_rand_enc_distribution(pk, build(a, b), cfg.eps);
    }
  }
  std::vector<Outcome> universe;
  for (const auto& u : units_mod(pk.n)) universe.push_back(ciphertext_outcome(pk, {u}));

  Rational bound(static_cast<int64_t>(k + 1), static_cast<int64_t>(k));
  Rational worst_plain(0);
  double worst_full = 0;
  uint64_t violations = 0;
  // Neighbors move one record between the types zero, one, invalid.
  for (const auto& [ab, p] : dists) {
    auto [a, b] = ab;
    size_t c = m - a - b;
    std::vector<std::pair<size_t, size_t>> nbrs;
    if (a > 0) nbrs.insert(nbrs.end(), {{a - 1, b + 1}, {a - 1, b}});
    if (b > 0) nbrs.insert(nbrs.end(), {{a + 1, b - 1}, {a, b - 1}});
    if (c > 0) nbrs.insert(nbrs.end(), {{a + 1, b}, {a, b + 1}});
    for (auto [a2, b2] : nbrs) {
      auto tot1 = static_cast<int64_t>(a + b + 2 * k), tot2 = static_cast<int64_t>(a2 + b2 + 2 * k);
      Rational r0 = Rational(static_cast<int64_t>(a + k), tot1) /
                    Rational(static_cast<int64_t>(a2 + k), tot2);
      Rational r1 = Rational(static_cast<int64_t>(b + k), tot1) /
                    Rational(static_cast<int64_t>(b2 + k), tot2);
      worst_plain = max(worst_plain, max(r0, r1));
      if (r0 > bound || r1 > bound) ++violations;
      auto pa = align(p, universe), qa = align(dists.at({a2, b2}), universe);
      for (size_t i = 0; i < universe.size(); ++i) {
        if (pa.probs()[i] == 0) continue;
        if (qa.probs()[i] == 0) {
          worst_full = INFINITY;
          continue;
        }
        worst_full = std::max(worst_full, pa.probs()[i] / qa.probs()[i]);
      }
    }
  }
  // Clean samples: m encryptions of one bit.
  double fail_enum = 0;
  for (int bit = 0; bit < 2; ++bit) {
    const auto& d = dists.at(bit == 0 ? std::pair<size_t, size_t>{m, 0} : std::pair<size_t, size_t>{0, m});
    double f = 0;
    for (size_t i = 0; i < d.size(); ++i) {
      mpz_class v;
      const auto& o = d.outcomes()[i];
      mpz_import(v.get_mpz_t(), o.size(), 1, 1, 1, 0, o.data());
      if (dec(keys.sk, {v}) != bit) f += d.probs()[i];
    }
    fail_enum = std::max(fail_enum, f);
  }
  Rational expected(static_cast<int64_t>(k), static_cast<int64_t>(m + 2 * k));
  auto [p0, p1] = dp_rand_enc_plaintext_probs(m, 0, k);
  (void)p0;
  CheckResult res;
  res.metrics.push_back(metric("plaintext_ratio_violations", static_cast<double>(violations),
                               Cmp::kLessEq, 0));
  res.metrics.push_back(metric("dp_ratio_max", worst_plain.to_double(), Cmp::kLessEq,
                               bound.to_double()));
  res.metrics.push_back(metric("output_ratio_max", worst_full, Cmp::kLessEq,
                               bound.to_double() * (1 + 1e-12)));
  res.metrics.push_back(metric("failure_rate", fail_enum, Cmp::kLessEq,
                               expected.to_double() + 1e-12));
  res.metrics.push_back(metric("failure_probability_error",
                               std::abs(fail_enum - expected.to_double()), Cmp::kLessEq, 1e-12));
  res.metrics.push_back(metric("failure_count_formula_error", std::abs(p1 - expected.to_double()),
                               Cmp::kLessEq, 0));
  res.constants["k"] = static_cast<double>(k);
  res.constants["m"] = static_cast<double>(m);
  res.constants["N"] = static_cast<double>(cfg.p * cfg.q);
  res.notes["failure_probability"] = expected.to_string();
  res.notes["dp_ratio_max"] = worst_plain.to_string();
  return res;
}

CheckResult check_rerandomization(unsigned p, unsigned q, const RandomTape& tape) {
  GMKeys keys = GMKeys::from_primes(p, q, tape.derive(0));
  const auto& pk = keys.pk;
  auto units = units_mod(pk.n);
  int64_t worst_diff = 0;
  double worst_tv = 0;
  for (int bit = 0; bit < 2; ++bit) {
    GMCiphertext c1 = enc(pk, bit, tape.derive({1, static_cast<uint64_t>(bit)}));
    GMCiphertext c2 = c1;
    for (uint64_t j = 0; c2 == c1; ++j) c2 = enc(pk, bit, tape.derive({2, static_cast<uint64_t>(bit), j}));
    std::map<unsigned long, int64_t> diff;
    for (const auto& u : units) {
      mpz_class sq = u * u;
      diff[mpz_class(c1.value * sq % pk.n).get_ui()] += 1;
      diff[mpz_class(c2.value * sq % pk.n).get_ui()] -= 1;
    }
    for (const auto& [v, d] : diff) worst_diff = std::max(worst_diff, std::abs(d));
    worst_tv = std::max(worst_tv, tv_distance(rerandomize_distribution(pk, c1),
                                              rerandomize_distribution(pk, c2)));
  }
  CheckResult res;
  res.metrics.push_back(metric("max_count_difference", static_cast<double>(worst_diff),
                               Cmp::kLessEq, 0));
  res.metrics.push_back(metric("tv_same_plaintext", worst_tv, Cmp::kLessEq, 0));
  res.constants["N"] = static_cast<double>(p * q);
  res.constants["units"] = static_cast<double>(units.size());
  return res;
}

CheckResult check_adversary(const AdversaryCheck& cfg, const RandomTape& tape) {
  GMKeys keys = keygen(cfg.prime_bits, tape.derive(0));
  auto est = estimate_advantage(keys.pk, cheat_solver(keys), cfg.m, cfg.challenges, tape.derive(1));
  CheckResult res;
  res.metrics.push_back(metric("advantage", est.advantage, Cmp::kGreaterEq, 0.99, est.half_width));
  res.constants["prime_bits"] = cfg.prime_bits;
  res.constants["challenges"] = static_cast<double>(cfg.challenges);
  res.constants["m"] = static_cast<double>(cfg.m);
  res.notes["N"] = keys.pk.n.get_str();
  return res;
}

double benchmark_weight(uint32_t element) {
  if (element == 0) return 0.85;
  if (element == 1) return 0.45;
  return element < 32 ? 0.1 : 0;
}

SubsetSampler benchmark_subset_sampler() {
  SubsetSampler s;
  s.universe_size = 32;
  s.max_subset_size = 8;
  s.generate = [](DataSource& data) {
    TapeReader& r = data.reader();
    std::vector<uint32_t> out;
    if (r.unit() < 0.85) out.push_back(0);
    if (r.unit() < 0.45) out.push_back(1);
    std::vector<uint32_t> extra;
    while (extra.size() < 3) {
      auto e = static_cast<uint32_t>(2 + r.below(30));
      if (std::find(extra.begin(), extra.end(), e) == extra.end()) extra.push_back(e);
    }
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
  };
  return s;
}

CheckResult check_list_heavy_hitter(const HeavyHitterCheck& cfg, const RandomTape& tape) {
  SubsetSampler sampler = benchmark_subset_sampler();
  std::vector<uint8_t> heavy(cfg.runs);
  parallel_for(cfg.runs, [&](uint64_t r) {
    DataSource d(unit_sampler(), tape.derive({0, r, 1}));
    auto out = list_heavy_hitter(sampler, cfg.eta, cfg.rho, cfg.beta, d, tape.derive({0, r, 0}),
                                 cfg.constants);
    heavy[r] = out && benchmark_weight(*out) >= cfg.eta / 2;
  });
  std::vector<uint8_t> same(cfg.pairs);
  parallel_for(cfg.pairs, [&](uint64_t t) {
    DataSource d1(unit_sampler(), tape.derive({1, t, 1}));
    DataSource d2(unit_sampler(), tape.derive({1, t, 2}));
    RandomTape shared = tape.derive({1, t, 0});
    same[t] = list_heavy_hitter(sampler, cfg.eta, cfg.rho, cfg.beta, d1, shared, cfg.constants) ==
              list_heavy_hitter(sampler, cfg.eta, cfg.rho, cfg.beta, d2, shared, cfg.constants);
  });
  double hr = static_cast<double>(std::count(heavy.begin(), heavy.end(), 1)) /
              static_cast<double>(cfg.runs);
  double rep = static_cast<double>(std::count(same.begin(), same.end(), 1)) /
               static_cast<double>(cfg.pairs);
  double hw = wald_half_width(rep, cfg.pairs);
  auto p = HeavyHitterParams::resolve(cfg.eta, cfg.rho, cfg.beta, sampler.max_subset_size,
                                      cfg.constants);
  CheckResult res;
  res.metrics.push_back(metric("heavy_output_rate", hr, Cmp::kGreaterEq, 1 - cfg.beta,
                               wald_half_width(hr, cfg.runs)));
  res.metrics.push_back(metric("measured_replicability", rep, Cmp::kGreaterEq,
                               1 - cfg.rho - 3 * hw, hw));
  res.constants["t1"] = static_cast<double>(p.t1);
  res.constants["t2"] = static_cast<double>(p.t2);
  res.constants["grid"] = static_cast<double>(p.grid);
  res.constants["tau"] = p.tau;
  res.constants["c_tau"] = cfg.constants.c_tau;
  res.constants["c1"] = cfg.constants.c1;
  res.constants["c2"] = cfg.constants.c2;
  return res;
}

Seed acceptance_seed() { return Seed{0, 0x5eed}; }

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list = {
      {1, "pairwise-independence", 1,
       [](const RandomTape&) { return check_pairwise_independence(); }},
      {2, "consistent-sampler", 30,
       [](const RandomTape& t) { return check_consistent_sampler({}, t); }},
      {3, "corrsamp-accuracy", 300,
       [](const RandomTape& t) { return check_corrsamp_accuracy({}, t); }},
      {4, "corrsamp-correlation", 300,
       [](const RandomTape& t) { return check_corrsamp_correlation({}, t); }},
      {5, "finite-learner", 120,
       [](const RandomTape& t) {
         FiniteClass cls = graded_class(32, 64);
         return check_finite_learner({}, cls, realizable_distribution(cls, 0), t);
       }},
      {6, "random-ordering", 1, [](const RandomTape&) { return check_random_ordering(); }},
      {7, "rep-to-dp-privacy", 60,
       [](const RandomTape& t) {
         RepToDpCheck c;
         c.trials = 0;
         return check_rep_to_dp(c, t);
       }},
      {8, "rep-to-pg", 300, [](const RandomTape& t) { return check_rep_to_pg({}, t); }},
      {9, "dp-to-rep", 180, [](const RandomTape& t) { return check_dp_to_rep({}, t); }},
      {10, "dp-rand-enc", 10, [](const RandomTape& t) { return check_dp_rand_enc({}, t); }},
      {11, "gm-rerandomization", 5,
       [](const RandomTape& t) { return check_rerandomization(7, 11, t); }},
      {12, "adversary-advantage", 60, [](const RandomTape& t) { return check_adversary({}, t); }},
      {13, "list-heavy-hitters", 120,
       [](const RandomTape& t) { return check_list_heavy_hitter({}, t); }},
  };
  return list;
}

}  // namespace stability
