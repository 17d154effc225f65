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

#include "stability/dist.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "stability/parallel.hpp"

namespace stability {

Outcome outcome_from_u64(uint64_t v) {
  Outcome o(8, '\0');
  for (int i = 0; i < 8; ++i) o[7 - i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  return o;
}

uint64_t outcome_to_u64(const Outcome& o) {
  if (o.size() > 8) throw std::invalid_argument("outcome wider than 8 bytes");
  uint64_t v = 0;
  for (unsigned char c : o) v = (v << 8) | c;
  return v;
}

std::string outcome_hex(const Outcome& o) {
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * o.size());
  for (unsigned char c : o) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xF]);
  }
  return out;
}

Outcome outcome_from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("outcome hex: odd length");
  auto nibble = [](char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("outcome hex: invalid digit");
  };
  Outcome o(hex.size() / 2, '\0');
  for (size_t i = 0; i < o.size(); ++i) {
    o[i] = static_cast<char>(nibble(hex[2 * i]) * 16 + nibble(hex[2 * i + 1]));
  }
  return o;
}

FiniteDistribution::FiniteDistribution(std::vector<Outcome> outcomes,
                                       std::vector<double> probs)
    : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
  if (outcomes_.size() != probs_.size()) {
    throw std::invalid_argument("distribution: outcomes and probs differ in length");
  }
  if (outcomes_.empty()) throw std::invalid_argument("distribution: empty");
  double sum = 0;
  for (size_t i = 0; i < outcomes_.size(); ++i) {
    if (!(probs_[i] >= 0) || !std::isfinite(probs_[i])) {
      throw std::invalid_argument("distribution: negative or non-finite probability");
    }
    if (!index_.emplace(outcomes_[i], i).second) {
      throw std::invalid_argument("distribution: duplicate outcome " +
                                  outcome_hex(outcomes_[i]));
    }
    sum += probs_[i];
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    throw std::invalid_argument("distribution: probabilities do not sum to 1");
  }
}

FiniteDistribution FiniteDistribution::point_mass(const Outcome& o) {
  return FiniteDistribution({o}, {1.0});
}

FiniteDistribution FiniteDistribution::uniform(std::vector<Outcome> outcomes) {
  std::vector<double> probs(outcomes.size(), 1.0 / outcomes.size());
  return FiniteDistribution(std::move(outcomes), std::move(probs));
}

double FiniteDistribution::prob(const Outcome& o) const {
  auto it = index_.find(o);
  return it == index_.end() ? 0.0 : probs_[it->second];
}

std::optional<size_t> FiniteDistribution::index_of(const Outcome& o) const {
  auto it = index_.find(o);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

// Aligned probability pairs over the union of supports.
std::vector<std::pair<double, double>> aligned(const FiniteDistribution& p,
                                               const FiniteDistribution& q) {
  std::vector<std::pair<double, double>> out;
  out.reserve(p.size() + q.size());
  for (size_t i = 0; i < p.size(); ++i) {
    out.emplace_back(p.probs()[i], q.prob(p.outcomes()[i]));
  }
  for (size_t i = 0; i < q.size(); ++i) {
    if (!p.index_of(q.outcomes()[i])) out.emplace_back(0.0, q.probs()[i]);
  }
  return out;
}

}  // namespace

double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
  double sum = 0;
  for (auto [a, b] : aligned(p, q)) sum += std::abs(a - b);
  return std::min(1.0, sum / 2);
}

double privacy_loss_excess(const FiniteDistribution& p,
                           const FiniteDistribution& q, double eps) {
  double factor = std::exp(eps);
  double excess = 0;
  for (auto [a, b] : aligned(p, q)) excess += std::max(0.0, a - factor * b);
  return excess;
}

bool indistinguishable(const FiniteDistribution& p, const FiniteDistribution& q,
                       double eps, double delta) {
  return privacy_loss_excess(p, q, eps) <= delta + kProbTolerance &&
         privacy_loss_excess(q, p, eps) <= delta + kProbTolerance;
}

FiniteDistribution align(const FiniteDistribution& p,
                         const std::vector<Outcome>& universe) {
  std::vector<double> probs(universe.size(), 0.0);
  double covered = 0;
  for (size_t i = 0; i < universe.size(); ++i) {
    probs[i] = p.prob(universe[i]);
    covered += probs[i];
  }
  if (std::abs(covered - 1.0) > kProbTolerance) {
    throw std::invalid_argument("align: universe misses part of the support");
  }
  return FiniteDistribution(universe, std::move(probs));
}

EmpiricalDistribution empirical(std::span<const Outcome> samples) {
  EmpiricalDistribution e;
  for (const auto& s : samples) e.add(s);
  return e;
}

FiniteDistribution normalize(const EmpiricalDistribution& e) {
  if (e.total == 0) throw std::invalid_argument("empty empirical distribution");
  std::vector<Outcome> outcomes;
  std::vector<double> probs;
  for (const auto& [o, c] : e.counts) {
    outcomes.push_back(o);
    probs.push_back(static_cast<double>(c) / static_cast<double>(e.total));
  }
  return FiniteDistribution(std::move(outcomes), std::move(probs));
}

std::string distribution_to_json(const FiniteDistribution& p) {
  nlohmann::json j = nlohmann::json::array();
  for (size_t i = 0; i < p.size(); ++i) {
    j.push_back({outcome_hex(p.outcomes()[i]), p.probs()[i]});
  }
  return j.dump();
}

FiniteDistribution distribution_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("distribution json: ") + e.what());
  }
  if (!j.is_array()) {
    throw std::invalid_argument("distribution json: expected an array of pairs");
  }
  std::vector<Outcome> outcomes;
  std::vector<double> probs;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
        !pair[1].is_number()) {
      throw std::invalid_argument(
          "distribution json: expected [outcome-hex, probability]");
    }
    outcomes.push_back(outcome_from_hex(pair[0].get<std::string>()));
    probs.push_back(pair[1].get<double>());
  }
  return FiniteDistribution(std::move(outcomes), std::move(probs));
}

DataSampler::DataSampler(FiniteDistribution dist) : dist_(std::move(dist)) {
  double acc = 0;
  for (size_t i = 0; i < dist_.size(); ++i) {
    records_.push_back(outcome_to_u64(dist_.outcomes()[i]));
    acc += dist_.probs()[i];
    cdf_.push_back(acc);
  }
  // Draws land strictly below the last positive entry.
  for (size_t i = cdf_.size(); i-- > 0;) {
    if (dist_.probs()[i] > 0) {
      for (size_t j = i; j < cdf_.size(); ++j) cdf_[j] = 2.0;
      break;
    }
  }
}

Record DataSampler::draw(TapeReader& reader) const {
  double u = reader.unit(53);
  size_t i = std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
  return records_[i];
}

Sample DataSampler::draw(size_t n, TapeReader& reader) const {
  Sample s(n);
  for (auto& r : s) r = draw(reader);
  return s;
}

double wald_half_width(double p, uint64_t n) {
  if (n == 0) return 1.0;
  return 1.96 * std::sqrt(std::max(0.0, p * (1 - p)) / static_cast<double>(n));
}

Estimate estimate_rate(uint64_t trials,
                       const std::function<bool(uint64_t)>& event) {
  std::vector<char> hit(trials, 0);
  parallel_for(trials, [&](uint64_t t) { hit[t] = event(t) ? 1 : 0; });
  uint64_t count = std::count(hit.begin(), hit.end(), 1);
  Estimate e;
  e.trials = trials;
  e.value = trials == 0 ? 0.0 : static_cast<double>(count) / trials;
  e.half_width = wald_half_width(e.value, trials);
  return e;
}

Estimate estimate_replicability(const SampleAlgorithm& alg,
                                const FiniteDistribution& data_dist, size_t n,
                                uint64_t trials, const RandomTape& tape) {
  if (trials < 100) {
    throw std::invalid_argument("estimate_replicability: trials must be >= 100");
  }
  DataSampler sampler(data_dist);
  return estimate_rate(trials, [&](uint64_t t) {
    RandomTape coins = tape.derive({t, 0});
    TapeReader r1(tape.derive({t, 1}));
    TapeReader r2(tape.derive({t, 2}));
    Sample s1 = sampler.draw(n, r1);
    Sample s2 = sampler.draw(n, r2);
    return alg(s1, coins) == alg(s2, coins);
  });
}

double chi_square_p_value(std::span<const uint64_t> observed,
                          std::span<const double> probs) {
  if (observed.size() != probs.size()) {
    throw std::invalid_argument("chi_square: size mismatch");
  }
  uint64_t total = 0;
  for (uint64_t o : observed) total += o;
  double stat = 0;
  int bins = 0;
  double pooled_expected = 0, pooled_observed = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    double expected = probs[i] * static_cast<double>(total);
    if (expected < 5) {
      pooled_expected += expected;
      pooled_observed += static_cast<double>(observed[i]);
      continue;
    }
    double d = static_cast<double>(observed[i]) - expected;
    stat += d * d / expected;
    ++bins;
  }
  if (pooled_expected > 0) {
    double d = pooled_observed - pooled_expected;
    stat += d * d / pooled_expected;
    ++bins;
  }
  if (bins < 2) return 1.0;
  boost::math::chi_squared chi(bins - 1);
  return boost::math::cdf(boost::math::complement(chi, stat));
}

}  // namespace stability
