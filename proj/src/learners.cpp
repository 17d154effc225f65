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

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace stability {
namespace {

void check_unit(double v, const char* name) {
  if (!(v > 0 && v < 1)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

size_t ceil_size(double v) {
  if (!std::isfinite(v) || v > 1e15) throw std::invalid_argument("sample size overflow");
  return static_cast<size_t>(std::max(1.0, std::ceil(v)));
}

}  // namespace

FiniteClass::FiniteClass(size_t domain_size,
                         const std::vector<std::vector<uint8_t>>& hypotheses)
    : domain_size_(domain_size) {
  if (domain_size == 0) throw std::invalid_argument("class: domain_size must be positive");
  if (hypotheses.empty()) throw std::invalid_argument("class: no hypotheses");
  std::set<std::vector<uint8_t>> seen;
  for (const auto& h : hypotheses) {
    if (h.size() != domain_size) {
      throw std::invalid_argument("class: hypothesis length " + std::to_string(h.size()) +
                                  " != domain_size " + std::to_string(domain_size));
    }
    std::vector<uint8_t> norm(h.size());
    for (size_t x = 0; x < h.size(); ++x) {
      if (h[x] > 1) throw std::invalid_argument("class: labels must be 0 or 1");
      norm[x] = h[x];
    }
    if (!seen.insert(norm).second) continue;
    labels_.insert(labels_.end(), norm.begin(), norm.end());
  }
}

FiniteClass FiniteClass::from_strings(const std::vector<std::string>& rows) {
  if (rows.empty()) throw std::invalid_argument("class: no hypotheses");
  std::vector<std::vector<uint8_t>> hs;
  for (const auto& r : rows) {
    std::vector<uint8_t> h;
    for (char c : r) {
      if (c != '0' && c != '1') throw std::invalid_argument("class: bad label character");
      h.push_back(static_cast<uint8_t>(c - '0'));
    }
    hs.push_back(std::move(h));
  }
  return FiniteClass(rows.front().size(), hs);
}

FiniteClass FiniteClass::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("class json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("domain_size") || !j.contains("hypotheses")) {
    throw std::invalid_argument("class json: expected {domain_size, hypotheses}");
  }
  if (!j["domain_size"].is_number_unsigned()) {
    throw std::invalid_argument("class json: domain_size must be a positive integer");
  }
  auto d = j["domain_size"].get<size_t>();
  std::vector<std::string> rows;
  for (const auto& h : j["hypotheses"]) {
    if (!h.is_string()) throw std::invalid_argument("class json: hypotheses must be strings");
    rows.push_back(h.get<std::string>());
  }
  FiniteClass c = from_strings(rows);
  if (c.domain_size() != d) {
    throw std::invalid_argument("class json: hypothesis length != domain_size");
  }
  return c;
}

std::string FiniteClass::to_json() const {
  nlohmann::json j;
  j["domain_size"] = domain_size_;
  j["hypotheses"] = nlohmann::json::array();
  for (size_t h = 0; h < size(); ++h) j["hypotheses"].push_back(row(h));
  return j.dump();
}

std::string FiniteClass::row(size_t h) const {
  std::string s(domain_size_, '0');
  for (size_t x = 0; x < domain_size_; ++x) s[x] = static_cast<char>('0' + label(h, x));
  return s;
}

LabeledSample to_labeled(const Sample& records) {
  LabeledSample s;
  s.reserve(records.size());
  for (Record r : records) {
    s.push_back({static_cast<uint32_t>(r / 2), static_cast<uint8_t>(r & 1)});
  }
  return s;
}

double true_risk(const FiniteClass& cls, size_t h, const FiniteDistribution& data) {
  double risk = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    Record r = outcome_to_u64(data.outcomes()[i]);
    uint64_t x = r / 2;
    if (x >= cls.domain_size()) throw std::invalid_argument("data point outside the domain");
    if (cls.label(h, x) != (r & 1)) risk += data.probs()[i];
  }
  return risk;
}

double optimal_risk(const FiniteClass& cls, const FiniteDistribution& data) {
  double best = 1;
  for (size_t h = 0; h < cls.size(); ++h) best = std::min(best, true_risk(cls, h, data));
  return best;
}

std::vector<uint64_t> mistake_counts(const FiniteClass& cls, const LabeledSample& s) {
  size_t d = cls.domain_size();
  std::vector<uint64_t> c0(d, 0), c1(d, 0);
  for (const auto& p : s) {
    if (p.x >= d) throw std::invalid_argument("sample point outside the domain");
    (p.y ? c1 : c0)[p.x]++;
  }
  std::vector<uint64_t> out(cls.size(), 0);
  for (size_t h = 0; h < cls.size(); ++h) {
    uint64_t m = 0;
    for (size_t x = 0; x < d; ++x) m += cls.label(h, x) ? c0[x] : c1[x];
    out[h] = m;
  }
  return out;
}

Rational empirical_risk(const FiniteClass& cls, size_t h, const LabeledSample& s) {
  if (s.empty()) throw std::invalid_argument("empirical_risk: empty sample");
  if (h >= cls.size()) throw std::out_of_range("empirical_risk: hypothesis index");
  int64_t mistakes = 0;
  for (const auto& p : s) {
    if (p.x >= cls.domain_size()) throw std::invalid_argument("sample point outside the domain");
    if (cls.label(h, p.x) != p.y) ++mistakes;
  }
  return Rational(mistakes, static_cast<int64_t>(s.size()));
}

Rational estimate_opt_rule(const Rational& opt_s, const Rational& alpha, uint64_t shift_k) {
  Rational a = alpha / 16 * Rational::dyadic(shift_k, 53);
  Rational width = alpha / 8;
  auto j = ((opt_s + alpha / 4 - a) / width).floor();
  Rational out = Rational(static_cast<int64_t>(j)) * width + a;
  return max(Rational(0), min(Rational(1), out));
}

Rational estimate_opt(const FiniteClass& cls, const LabeledSample& s,
                      const Rational& alpha, const RandomTape& tape) {
  if (s.empty()) throw std::invalid_argument("estimate_opt: empty sample");
  auto counts = mistake_counts(cls, s);
  auto best = *std::min_element(counts.begin(), counts.end());
  Rational opt_s(static_cast<int64_t>(best), static_cast<int64_t>(s.size()));
  TapeReader reader(tape);
  return estimate_opt_rule(opt_s, alpha, reader.bits(53));
}

size_t LearnerParams::sample_size(double rho, double alpha, double beta,
                                  bool realizable, size_t class_size, double c_m) {
  double lh = std::log(static_cast<double>(std::max<size_t>(class_size, 2)));
  double r2 = rho * rho;
  double r4 = r2 * r2;
  double num = lh * lh * std::log(1 / rho);
  if (realizable) return ceil_size(c_m * (num + r4 * std::log(1 / beta)) / (alpha * r4));
  return ceil_size(c_m * (num + r2 * std::log(1 / beta)) / (alpha * alpha * r4));
}

LearnerParams LearnerParams::resolve(double rho, double alpha, double beta,
                                     bool realizable, size_t class_size,
                                     const LearnerConstants& constants) {
  check_unit(rho, "rho");
  check_unit(alpha, "alpha");
  check_unit(beta, "beta");
  LearnerParams p;
  p.rho = rho;
  p.alpha = alpha;
  p.beta = beta;
  p.realizable = realizable;
  p.constants = constants;
  p.alpha_r = Rational::from_double(alpha, 1 << 16);
  double lh = std::log(static_cast<double>(std::max<size_t>(class_size, 2)));
  double tau_max = constants.c_tau * alpha * rho * rho / lh;
  double intervals = std::max(2.0, std::ceil(alpha / 4 / tau_max));
  if (intervals > 1e6) throw std::invalid_argument("tau too small: more than 1e6 thresholds");
  p.tau = p.alpha_r / 4 / Rational(static_cast<int64_t>(intervals));
  p.m = sample_size(rho, alpha, beta, realizable, class_size, constants.c_m);
  p.validate(class_size);
  return p;
}

void LearnerParams::validate(size_t class_size) const {
  check_unit(rho, "rho");
  check_unit(alpha, "alpha");
  check_unit(beta, "beta");
  if (class_size == 0) throw std::invalid_argument("class must be non-empty");
  if (tau <= Rational(0)) throw std::invalid_argument("tau must be positive");
  Rational ratio = alpha_r / 4 / tau;
  if (!ratio.is_integer()) throw std::invalid_argument("tau must divide alpha/4");
  if (ratio < Rational(2)) throw std::invalid_argument("tau must be at most alpha/8");
  double lh = std::log(static_cast<double>(std::max<size_t>(class_size, 2)));
  if (tau.to_double() > constants.c_tau * alpha * rho * rho / lh * (1 + 1e-12)) {
    throw std::invalid_argument("tau exceeds c_tau * alpha * rho^2 / ln|H|");
  }
  if (m == 0) throw std::invalid_argument("sample size m must be positive");
}

size_t LearnerParams::threshold_count() const {
  return static_cast<size_t>((alpha_r / 4 / tau).floor()) - 1;
}

size_t r_finite_learn_on(const FiniteClass& cls, const LabeledSample& s,
                         const LearnerParams& params, const RandomTape& tape,
                         LearnTrace* trace) {
  if (s.empty()) throw std::invalid_argument("r_finite_learn: empty sample");
  auto counts = mistake_counts(cls, s);
  auto n = static_cast<int64_t>(s.size());

  Rational v_init(0);
  if (!params.realizable) v_init = estimate_opt(cls, s, params.alpha_r, tape.derive(0));

  TapeReader pick(tape.derive(1));
  size_t i = pick.below(params.threshold_count());
  Rational v = v_init + Rational(static_cast<int64_t>(2 * i + 3)) * params.tau / 2;

  TapeReader order_reader(tape.derive(2));
  auto order = random_permutation(cls.size(), order_reader);

  std::optional<size_t> chosen;
  size_t best = order.front();
  for (uint32_t h : order) {
    if (counts[h] < counts[best]) best = h;
    if (!chosen && Rational(static_cast<int64_t>(counts[h]), n) <= v) chosen = h;
  }
  if (trace) {
    trace->v_init = v_init;
    trace->v = v;
    trace->threshold_index = i;
    trace->below.clear();
    for (size_t h = 0; h < cls.size(); ++h) {
      if (Rational(static_cast<int64_t>(counts[h]), n) <= v) trace->below.push_back(h);
    }
    trace->fallback = !chosen.has_value();
  }
  return chosen.value_or(best);
}

size_t r_finite_learn(const FiniteClass& cls, DataSource& data,
                      const LearnerParams& params, const RandomTape& tape,
                      LearnTrace* trace) {
  params.validate(cls.size());
  LabeledSample s = to_labeled(data.draw(params.m));
  return r_finite_learn_on(cls, s, params, tape, trace);
}

Learner finite_learner(const FiniteClass& cls, const LearnerParams& params) {
  params.validate(cls.size());
  Learner l;
  l.run = [cls, params](const LabeledSample& s, const RandomTape& tape) {
    return r_finite_learn_on(cls, s, params, tape);
  };
  l.sample_size = params.m;
  l.class_size = cls.size();
  return l;
}

DataLearner amplify_replicability(const Learner& base, double rho_target, double beta,
                                  const AmplifyConstants& constants) {
  check_unit(rho_target, "rho");
  check_unit(beta, "beta");
  if (!(constants.v_lo > 0 && constants.v_lo < constants.v_hi && constants.v_hi <= 1)) {
    throw std::invalid_argument("amplify: need 0 < v_lo < v_hi <= 1");
  }
  double l = std::log(1 / rho_target);
  size_t k = ceil_size(constants.c_k * l);
  size_t t = ceil_size(constants.c_t * l * l * l / (rho_target * rho_target));
  return [base, k, t, constants](DataSource& data, const RandomTape& tape) -> size_t {
    std::vector<LabeledSample> samples(t);
    for (auto& s : samples) s = to_labeled(data.draw(base.sample_size));

    TapeReader vr(tape.derive(1));
    double v = constants.v_lo + (constants.v_hi - constants.v_lo) * vr.unit();
    double bar = v * static_cast<double>(t);

    std::vector<uint8_t> listed(base.class_size, 0);
    bool any = false;
    RandomTape strings = tape.derive(0);
    for (size_t i = 0; i < k; ++i) {
      RandomTape r = strings.derive(i);
      std::vector<uint32_t> hits(base.class_size, 0);
      for (const auto& s : samples) {
        size_t h = base.run(s, r);
        if (h >= base.class_size) throw std::out_of_range("amplify: base output out of range");
        hits[h]++;
      }
      for (size_t h = 0; h < base.class_size; ++h) {
        if (static_cast<double>(hits[h]) >= bar) listed[h] = 1, any = true;
      }
    }
    if (any) {
      TapeReader orr(tape.derive(2));
      for (uint32_t h : random_permutation(base.class_size, orr)) {
        if (listed[h]) return h;
      }
    }
    LabeledSample fresh = to_labeled(data.draw(base.sample_size));
    return base.run(fresh, tape.derive(3));
  };
}

HeavyHitterParams HeavyHitterParams::resolve(double eta, double rho, double beta,
                                             size_t max_subset_size,
                                             const HeavyHitterConstants& constants) {
  check_unit(rho, "rho");
  check_unit(beta, "beta");
  if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("eta must lie in (0, 1]");
  if (max_subset_size == 0) throw std::invalid_argument("max subset size must be positive");
  auto dsz = static_cast<double>(max_subset_size);
  HeavyHitterParams p;
  p.grid = ceil_size(std::log(dsz) / (8 * constants.c_tau * rho));
  p.tau = eta / (8 * static_cast<double>(p.grid));
  double lrb = std::log(1 / (rho * beta));
  p.t1 = ceil_size(constants.c1 * std::log(dsz / (rho * beta)) / eta);
  double inner = std::log(dsz * lrb / eta);
  double r4 = rho * rho * rho * rho;
  p.t2 = ceil_size(constants.c2 * (inner * inner * std::log(1 / rho) + std::log(1 / beta)) /
                   (eta * eta * r4));
  return p;
}

std::optional<uint32_t> list_heavy_hitter(const SubsetSampler& sampler, double eta,
                                          double rho, double beta, DataSource& data,
                                          const RandomTape& tape,
                                          const HeavyHitterConstants& constants) {
  auto p = HeavyHitterParams::resolve(eta, rho, beta, sampler.max_subset_size, constants);
  size_t u = sampler.universe_size;
  if (u == 0) throw std::invalid_argument("heavy hitter: empty universe");
  auto next = [&] {
    auto c = sampler.generate(data);
    if (c.size() > sampler.max_subset_size) {
      throw std::invalid_argument("heavy hitter: subset larger than the declared maximum");
    }
    for (uint32_t e : c) {
      if (e >= u) throw std::out_of_range("heavy hitter: element outside the universe");
    }
    return c;
  };

  std::vector<uint8_t> in_t(u, 0);
  for (size_t i = 0; i < p.t1; ++i) {
    for (uint32_t e : next()) in_t[e] = 1;
  }
  std::vector<uint64_t> hits(u, 0);
  for (size_t i = 0; i < p.t2; ++i) {
    auto c = next();
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (uint32_t e : c) hits[e]++;
  }

  TapeReader pick(tape.derive(0));
  size_t i = pick.below(p.grid);
  double v = eta / 4 + 2 * p.tau + 4 * p.tau * static_cast<double>(i);
  double bar = v * static_cast<double>(p.t2);

  TapeReader orr(tape.derive(1));
  for (uint32_t e : random_permutation(u, orr)) {
    if (in_t[e] && static_cast<double>(hits[e]) >= bar) return e;
  }
  return std::nullopt;
}

std::vector<uint32_t> list_distribution_generator(
    const Learner& learner, const std::vector<RandomTape>& strings,
    const FiniteClass& cls, DataSource& data, double alpha, double beta,
    const ListGeneratorConstants& constants) {
  check_unit(alpha, "alpha");
  check_unit(beta, "beta");
  if (strings.empty()) throw std::invalid_argument("list generator: no random strings");
  size_t n = learner.sample_size;
  // Pi_H(n) <= |H| for a finite class.
  double lp = std::log(static_cast<double>(cls.size()));
  size_t t = ceil_size(constants.c_t * (lp + std::log(1 / beta)) / (alpha * alpha));

  Sample su = data.draw(n);
  LabeledSample sl = to_labeled(data.draw(t));

  std::set<std::vector<uint8_t>> labelings;
  std::set<uint32_t> outputs;
  LabeledSample labeled(n);
  for (size_t h = 0; h < cls.size(); ++h) {
    std::vector<uint8_t> ys(n);
    for (size_t j = 0; j < n; ++j) {
      auto x = static_cast<uint32_t>(su[j] / 2);
      if (x >= cls.domain_size()) throw std::invalid_argument("data point outside the domain");
      ys[j] = cls.label(h, x);
      labeled[j] = {x, ys[j]};
    }
    if (!labelings.insert(ys).second) continue;
    for (const auto& r : strings) {
      size_t out = learner.run(labeled, r);
      if (out >= cls.size()) throw std::out_of_range("list generator: learner output out of range");
      outputs.insert(static_cast<uint32_t>(out));
    }
  }

  auto counts = mistake_counts(cls, sl);
  uint64_t best = UINT64_MAX;
  for (uint32_t h : outputs) best = std::min(best, counts[h]);
  double bar = static_cast<double>(best) + alpha / 2 * static_cast<double>(t);
  std::vector<uint32_t> kept;
  for (uint32_t h : outputs) {
    if (static_cast<double>(counts[h]) <= bar) kept.push_back(h);
  }
  return kept;
}

std::optional<size_t> agnostic_learn(const FiniteClass& cls, DataSource& data,
                                     double rho, double alpha, double beta,
                                     const RandomTape& tape,
                                     const AgnosticConstants& constants) {
  check_unit(rho, "rho");
  check_unit(alpha, "alpha");
  check_unit(beta, "beta");
  auto params = LearnerParams::resolve(0.25, alpha / 4, beta / 4, true, cls.size(),
                                       constants.learner);
  Learner base = finite_learner(cls, params);
  size_t k = ceil_size(constants.lists.c_strings * std::log(1 / beta));
  std::vector<RandomTape> strings;
  RandomTape root = tape.derive(1);
  for (size_t i = 0; i < k; ++i) strings.push_back(root.derive(i));

  SubsetSampler sampler;
  sampler.universe_size = cls.size();
  sampler.max_subset_size = cls.size();
  sampler.generate = [&](DataSource& d) {
    return list_distribution_generator(base, strings, cls, d, alpha, beta, constants.lists);
  };
  auto out = list_heavy_hitter(sampler, 0.5, rho, beta, data, tape.derive(0), constants.heavy);
  if (!out) return std::nullopt;
  return static_cast<size_t>(*out);
}

}  // namespace stability
