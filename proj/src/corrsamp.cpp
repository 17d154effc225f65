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

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace stability {
namespace {

using u128 = unsigned __int128;

constexpr uint64_t kConsistentRoundCap = uint64_t{1} << 24;
constexpr unsigned kMaxSlackBits = 30;
constexpr uint64_t kMaxInnerTrials = uint64_t{1} << 40;

unsigned min_slack(unsigned m, double nu, int c0) {
  double base = std::ceil(std::log2(static_cast<double>(m)) + std::log2(1.0 / nu));
  return static_cast<unsigned>(std::max(1.0, base + c0));
}

double t1_floor(unsigned m, unsigned k, double nu, double c1) {
  return c1 * m * k * std::ldexp(1.0, static_cast<int>(k)) * std::log(1.0 / nu);
}

double t2_floor(unsigned k, uint64_t T1, double nu, double c2) {
  return c2 * std::ldexp(1.0, static_cast<int>(k)) / (nu * nu) *
         std::log(static_cast<double>(T1) / nu);
}

// (beta/2) 2^-k < count/T2 <= beta 2^-k, exactly.
bool in_window(uint64_t count, uint64_t T2, unsigned k, Beta beta) {
  u128 scaled = static_cast<u128>(count) << k;
  u128 rhs = ((static_cast<u128>(1) << 53) + beta.frac) * T2;
  return (scaled << 53) <= rhs && (scaled << 54) > rhs;
}

std::optional<uint64_t> unique_in_window(
    const std::vector<std::pair<uint64_t, uint64_t>>& tally, uint64_t T2,
    unsigned k, Beta beta) {
  std::optional<uint64_t> found;
  for (auto [x, count] : tally) {
    if (!in_window(count, T2, k, beta)) continue;
    if (found) return std::nullopt;
    found = x;
  }
  return found;
}

void bump(std::vector<std::pair<uint64_t, uint64_t>>& tally, uint64_t x) {
  for (auto& [y, n] : tally) {
    if (y == x) {
      ++n;
      return;
    }
  }
  tally.emplace_back(x, 1);
}

}  // namespace

Outcome consistent_sample(const FiniteDistribution& p, const RandomTape& tape) {
  TapeReader reader(tape);
  const auto& probs = p.probs();
  for (uint64_t round = 0; round < kConsistentRoundCap; ++round) {
    uint64_t i = reader.below(probs.size());
    double h = std::ldexp(static_cast<double>(reader.bits(53)), -53);
    if (h < probs[i]) return p.outcomes()[i];
  }
  throw std::runtime_error("consistent sampler exhausted");
}

CorrSampParams CorrSampParams::resolve(unsigned m, double nu,
                                       const CorrSampConstants& constants) {
  if (!(nu > 0 && nu < 0.5)) throw std::invalid_argument("corrsamp: nu must be in (0, 0.5)");
  if (m == 0 || m > TruthTableCircuit::kMaxInBits) {
    throw std::invalid_argument("corrsamp: m must be in [1, 20]");
  }
  CorrSampParams p;
  p.nu = nu;
  p.constants = constants;
  p.k = min_slack(m, nu, constants.c0);
  p.T1 = static_cast<uint64_t>(std::ceil(t1_floor(m, p.k, nu, constants.c1)));
  p.T2 = static_cast<uint64_t>(std::ceil(t2_floor(p.k, p.T1, nu, constants.c2)));
  p.validate(m);
  return p;
}

void CorrSampParams::validate(unsigned m) const {
  if (!(nu > 0 && nu < 0.5)) throw std::invalid_argument("corrsamp: nu must be in (0, 0.5)");
  if (!(constants.c1 > 0) || !(constants.c2 > 0)) {
    throw std::invalid_argument("corrsamp: c1 and c2 must be positive");
  }
  if (k < min_slack(m, nu, constants.c0)) {
    throw std::invalid_argument("corrsamp: k below ceil(log2 m + log2(1/nu)) + c0");
  }
  if (k > kMaxSlackBits || m + k > 64) {
    throw std::invalid_argument("corrsamp: k too large for 64-bit hashes");
  }
  if (T1 == 0 || static_cast<double>(T1) < t1_floor(m, k, nu, constants.c1)) {
    throw std::invalid_argument("corrsamp: T1 below c1*m*k*2^k*ln(1/nu)");
  }
  if (T2 == 0 || static_cast<double>(T2) < t2_floor(k, T1, nu, constants.c2)) {
    throw std::invalid_argument("corrsamp: T2 below c2*2^k*nu^-2*ln(T1/nu)");
  }
  if (T2 > kMaxInnerTrials) throw std::invalid_argument("corrsamp: T2 exceeds 2^40");
}

std::optional<uint64_t> hash_check(const TruthTableCircuit& c, unsigned ell,
                                   const GF2AffineHash& h1, uint64_t u,
                                   const GF2AffineHash& h2, uint64_t v,
                                   const InverterOracle& oracle,
                                   const RandomTape& tape) {
  TruthTableCircuit f = compose_F(c, h1, h2, ell);
  auto r = invert(oracle, f, (u << h2.out_bits()) | v, tape);
  if (!r) return std::nullopt;
  return c(*r);
}

std::optional<uint64_t> elem_find(const TruthTableCircuit& c,
                                  const CorrSampParams& params, unsigned ell,
                                  Beta beta, const GF2AffineHash& h1,
                                  uint64_t u, const InverterOracle& oracle,
                                  const RandomTape& tape, ElemFindPath path) {
  if (path == ElemFindPath::kAuto && oracle.exact_inverter()) {
    return CorrSampler(c, params, oracle).elem_find(ell, beta, h1, u, tape);
  }
  unsigned m = c.in_bits();
  if (ell > m) throw std::invalid_argument("elem_find: ell exceeds in_bits");
  unsigned width = m - ell + params.k;
  RandomTape trials = tape.derive(4);
  TapeReader reader(trials);
  std::vector<std::pair<uint64_t, uint64_t>> tally;
  for (uint64_t i = 0; i < params.T2; ++i) {
    GF2AffineHash h2 = sample_hash(m, width, reader);
    uint64_t v = reader.bits(width);
    if (auto x = hash_check(c, ell, h1, u, h2, v, oracle, trials)) bump(tally, *x);
  }
  return unique_in_window(tally, params.T2, params.k, beta);
}

CorrSampler::CorrSampler(const TruthTableCircuit& c, CorrSampParams params,
                         InverterOracle oracle)
    : circuit_(c), params_(params), oracle_(oracle) {
  params_.validate(c.in_bits());
  std::map<uint64_t, std::vector<uint64_t>> by_output;
  for (uint64_t r = 0; r < c.table().size(); ++r) by_output[c(r)].push_back(r);
  for (auto& [y, rs] : by_output) {
    support_.push_back({y, rs.size(), preimages_.size()});
    preimages_.insert(preimages_.end(), rs.begin(), rs.end());
  }
}

std::vector<uint64_t> CorrSampler::preimages_hashing_to(const GF2AffineHash& h1,
                                                        uint64_t u) const {
  std::vector<uint64_t> out;
  for (const auto& s : support_) {
    if (h1.apply(s.y) != u) continue;
    out.insert(out.end(), preimages_.begin() + s.begin,
               preimages_.begin() + s.begin + s.count);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<uint64_t> CorrSampler::elem_find(unsigned ell, Beta beta,
                                                    const GF2AffineHash& h1,
                                                    uint64_t u,
                                                    const RandomTape& round) const {
  std::vector<uint64_t> candidates = preimages_hashing_to(h1, u);
  if (candidates.empty()) return std::nullopt;
  unsigned m = circuit_.in_bits();
  unsigned width = m - ell + params_.k;
  TapeReader reader(round.derive(4));
  std::vector<std::pair<uint64_t, uint64_t>> tally;
  uint64_t cols[64];
  for (uint64_t i = 0; i < params_.T2; ++i) {
    for (unsigned j = 0; j < m; ++j) cols[j] = reader.bits(width);
    uint64_t offset = reader.bits(width);
    uint64_t target = offset ^ reader.bits(width);
    for (uint64_t r : candidates) {
      uint64_t acc = 0;
      for (uint64_t x = r; x; x &= x - 1) acc ^= cols[__builtin_ctzll(x)];
      if (acc == target) {
        bump(tally, circuit_(r));
        break;
      }
    }
  }
  return unique_in_window(tally, params_.T2, params_.k, beta);
}

std::optional<uint64_t> CorrSampler::sample(const RandomTape& tape,
                                            CorrSampStats* stats,
                                            ElemFindPath path) const {
  unsigned m = circuit_.in_bits();
  unsigned n = circuit_.out_bits();
  unsigned k = params_.k;
  for (uint64_t t = 0; t < params_.T1; ++t) {
    RandomTape round = tape.derive(t);
    Beta beta{TapeReader(round.derive(0)).bits(53)};
    auto ell = static_cast<unsigned>(TapeReader(round.derive(1)).below(m + 1));
    GF2AffineHash h1 = sample_hash(n, ell + k, round.derive(2));
    uint64_t u = TapeReader(round.derive(3)).bits(ell + k);
    if (stats) {
      stats->rounds_used = t + 1;
      unsigned dense = 0;
      for (const auto& s : support_) {
        // count / 2^m in [2^(-ell-4), 2^(-ell+4)]
        bool in_band = (s.count << (ell + 4)) >= (uint64_t{1} << m) &&
                       (s.count << ell) <= (uint64_t{1} << (m + 4));
        if (in_band && h1.apply(s.y) == u) ++dense;
      }
      if (dense <= 1) ++stats->unique_rounds;
    }
    std::optional<uint64_t> x;
    if (path == ElemFindPath::kAuto && oracle_.exact_inverter()) {
      x = elem_find(ell, beta, h1, u, round);
    } else {
      x = stability::elem_find(circuit_, params_, ell, beta, h1, u, oracle_, round,
                    ElemFindPath::kReference);
    }
    if (x) return x;
  }
  return std::nullopt;
}

std::vector<std::optional<uint64_t>> sample_jointly(
    const std::vector<const CorrSampler*>& samplers, const RandomTape& tape) {
  if (samplers.empty()) return {};
  const CorrSampler& first = *samplers.front();
  unsigned m = first.circuit().in_bits();
  unsigned n = first.circuit().out_bits();
  const CorrSampParams& params = first.params();
  for (const CorrSampler* s : samplers) {
    if (!s->exact_oracle() || s->circuit().in_bits() != m || s->circuit().out_bits() != n ||
        s->params().k != params.k || s->params().T1 != params.T1 ||
        s->params().T2 != params.T2) {
      throw std::invalid_argument(
          "sample_jointly: samplers need exact oracles, equal widths and equal params");
    }
  }
  size_t count = samplers.size();
  unsigned k = params.k;
  std::vector<std::optional<uint64_t>> out(count);
  std::vector<uint8_t> active(count, 1);
  size_t remaining = count;
  std::vector<std::vector<uint64_t>> cands(count);
  std::vector<std::vector<std::pair<uint64_t, uint64_t>>> tally(count);
  uint64_t cols[64];
  for (uint64_t t = 0; t < params.T1 && remaining > 0; ++t) {
    RandomTape round = tape.derive(t);
    Beta beta{TapeReader(round.derive(0)).bits(53)};
    auto ell = static_cast<unsigned>(TapeReader(round.derive(1)).below(m + 1));
    GF2AffineHash h1 = sample_hash(n, ell + k, round.derive(2));
    uint64_t u = TapeReader(round.derive(3)).bits(ell + k);
    bool any = false;
    for (size_t s = 0; s < count; ++s) {
      cands[s].clear();
      tally[s].clear();
      if (active[s]) cands[s] = samplers[s]->preimages_hashing_to(h1, u);
      any = any || !cands[s].empty();
    }
    if (!any) continue;
    unsigned width = m - ell + k;
    TapeReader reader(round.derive(4));
    for (uint64_t i = 0; i < params.T2; ++i) {
      for (unsigned j = 0; j < m; ++j) cols[j] = reader.bits(width);
      uint64_t offset = reader.bits(width);
      uint64_t target = offset ^ reader.bits(width);
      for (size_t s = 0; s < count; ++s) {
        for (uint64_t r : cands[s]) {
          uint64_t acc = 0;
          for (uint64_t x = r; x; x &= x - 1) acc ^= cols[__builtin_ctzll(x)];
          if (acc == target) {
            bump(tally[s], samplers[s]->circuit()(r));
            break;
          }
        }
      }
    }
    for (size_t s = 0; s < count; ++s) {
      if (cands[s].empty()) continue;
      if (auto x = unique_in_window(tally[s], params.T2, k, beta)) {
        out[s] = x;
        active[s] = 0;
        --remaining;
      }
    }
  }
  return out;
}

std::optional<uint64_t> corr_samp(const TruthTableCircuit& c, double nu,
                                  const InverterOracle& oracle,
                                  const RandomTape& tape,
                                  const CorrSampConstants& constants) {
  CorrSampler sampler(c, CorrSampParams::resolve(c.in_bits(), nu, constants),
                      oracle);
  return sampler.sample(tape);
}

}  // namespace stability
