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

#ifndef STABILITY_CORRSAMP_HPP_
#define STABILITY_CORRSAMP_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "stability/circuit.hpp"
#include "stability/dist.hpp"
#include "stability/hashing.hpp"
#include "stability/rand.hpp"

namespace stability {

// Rejection-based correlated sampler over an explicit distribution. Round i
// reads (y uniform over p.outcomes(), h a 53-bit fraction) from one stream
// and accepts when h < p(y). Two distributions must list the same outcomes
// in the same order to be coupled (see align()).
Outcome consistent_sample(const FiniteDistribution& p, const RandomTape& tape);

// Constants behind the slack k and the round budgets:
//   k  = ceil(log2 m + log2(1/nu)) + c0
//   T1 = ceil(c1 * m * k * 2^k * ln(1/nu))
//   T2 = ceil(c2 * 2^k * nu^-2 * ln(T1/nu))
struct CorrSampConstants {
  int c0 = -2;
  double c1 = 1.0;
  double c2 = 0.0625;
};

struct CorrSampParams {
  double nu = 0.1;
  unsigned k = 0;
  uint64_t T1 = 0;
  uint64_t T2 = 0;
  CorrSampConstants constants;

  static CorrSampParams resolve(unsigned m, double nu,
                                const CorrSampConstants& constants = {});
  // Throws naming the violated bound.
  void validate(unsigned m) const;
};

// beta = 1 + frac / 2^53.
struct Beta {
  uint64_t frac = 0;
  double value() const { return 1.0 + std::ldexp(static_cast<double>(frac), -53); }
};

std::optional<uint64_t> hash_check(const TruthTableCircuit& c, unsigned ell,
                                   const GF2AffineHash& h1, uint64_t u,
                                   const GF2AffineHash& h2, uint64_t v,
                                   const InverterOracle& oracle,
                                   const RandomTape& tape);

enum class ElemFindPath {
  kAuto,       // direct preimage scan when the oracle is exact
  kReference,  // materialize F and invert it on every trial
};

// Inner trials read H2 then v, one after another, from tape[4], where `tape`
// is the round stream.
std::optional<uint64_t> elem_find(const TruthTableCircuit& c,
                                  const CorrSampParams& params, unsigned ell,
                                  Beta beta, const GF2AffineHash& h1,
                                  uint64_t u, const InverterOracle& oracle,
                                  const RandomTape& tape,
                                  ElemFindPath path = ElemFindPath::kAuto);

struct CorrSampStats {
  uint64_t rounds_used = 0;
  // Rounds where at most one y in H1^-1(u) has density in
  // [2^(-l-4), 2^(-l+4)].
  uint64_t unique_rounds = 0;
};

// Precomputes the support and preimage lists of one circuit so repeated
// runs avoid rescanning the table.
class CorrSampler {
 public:
  CorrSampler(const TruthTableCircuit& c, CorrSampParams params,
              InverterOracle oracle = InverterOracle::exact());

  // Round t uses stream [t]: beta [t,0], ell [t,1], H1 [t,2], u [t,3] and
  // inner trials [t,4].
  std::optional<uint64_t> sample(const RandomTape& tape,
                                 CorrSampStats* stats = nullptr,
                                 ElemFindPath path = ElemFindPath::kAuto) const;

  const CorrSampParams& params() const { return params_; }
  const TruthTableCircuit& circuit() const { return circuit_; }
  bool exact_oracle() const { return oracle_.exact_inverter(); }

  // Same draws and result as the reference path, scanning only the
  // preimages of outputs that hash to u. Exact oracle only.
  std::optional<uint64_t> elem_find(unsigned ell, Beta beta,
                                    const GF2AffineHash& h1, uint64_t u,
                                    const RandomTape& round) const;

  // Preimages of supported outputs hashing to u, ascending.
  std::vector<uint64_t> preimages_hashing_to(const GF2AffineHash& h1,
                                             uint64_t u) const;

 private:
  struct Level {
    uint64_t y;
    uint64_t count;
    size_t begin;  // into preimages_
  };

  TruthTableCircuit circuit_;
  CorrSampParams params_;
  InverterOracle oracle_;
  std::vector<Level> support_;
  std::vector<uint64_t> preimages_;
};

// Runs several samplers on one shared tape, reading each random draw once.
// Entry i equals samplers[i]->sample(tape). All samplers need the exact
// oracle, the same circuit widths and the same params.
std::vector<std::optional<uint64_t>> sample_jointly(
    const std::vector<const CorrSampler*>& samplers, const RandomTape& tape);

std::optional<uint64_t> corr_samp(const TruthTableCircuit& c, double nu,
                                  const InverterOracle& oracle,
                                  const RandomTape& tape,
                                  const CorrSampConstants& constants = {});

}  // namespace stability

#endif  // STABILITY_CORRSAMP_HPP_
