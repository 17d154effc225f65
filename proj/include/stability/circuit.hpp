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

#ifndef STABILITY_CIRCUIT_HPP_
#define STABILITY_CIRCUIT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "stability/dist.hpp"
#include "stability/hashing.hpp"
#include "stability/rand.hpp"

namespace stability {

// Truth table of C: {0,1}^m -> {0,1}^n, indexed by the integer value of the
// input string. Circuits read from files have m <= 20 and n <= 16; composed
// circuits may be wider (n <= 64).
class TruthTableCircuit {
 public:
  static constexpr unsigned kMaxInBits = 20;

  TruthTableCircuit(unsigned in_bits, unsigned out_bits,
                    std::vector<uint64_t> table);

  unsigned in_bits() const { return in_bits_; }
  unsigned out_bits() const { return out_bits_; }
  const std::vector<uint64_t>& table() const { return table_; }
  uint64_t operator()(uint64_t r) const { return table_[r]; }

 private:
  unsigned in_bits_;
  unsigned out_bits_;
  std::vector<uint64_t> table_;
};

// Outcome encoding of an n-bit circuit output.
inline Outcome circuit_outcome(uint64_t y) { return outcome_from_u64(y); }

FiniteDistribution induced_distribution(const TruthTableCircuit& c);

enum class InverterStrategy { kBruteForce, kBruteForceWithFailure };

struct InverterOracle {
  InverterStrategy strategy = InverterStrategy::kBruteForce;
  double failure_rate = 0;
  Seed failure_seed{};

  static InverterOracle exact() { return {}; }
  static InverterOracle with_failure(double rate, Seed seed);
  bool exact_inverter() const {
    return strategy == InverterStrategy::kBruteForce;
  }
};

// Image targets on which the failure-injecting oracle returns no preimage.
std::unordered_set<uint64_t> failing_targets(const InverterOracle& oracle,
                                             const TruthTableCircuit& c);

// Least r with C(r) = y, or nullopt. The tape is accepted for interface
// parity with randomized inverters and is not read.
std::optional<uint64_t> invert(const InverterOracle& oracle,
                               const TruthTableCircuit& c, uint64_t y,
                               const RandomTape& tape);

// F(r) = h1(C(r)) || h2(r), with h2's output in the low bits.
TruthTableCircuit compose_F(const TruthTableCircuit& c, const GF2AffineHash& h1,
                            const GF2AffineHash& h2, unsigned ell);

TruthTableCircuit parse_circuit(std::string_view text);
std::string emit_circuit(const TruthTableCircuit& c);
TruthTableCircuit load_circuit(const std::string& path);

}  // namespace stability

#endif  // STABILITY_CIRCUIT_HPP_
