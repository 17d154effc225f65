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

#ifndef STABILITY_CRYPTO_HPP_
#define STABILITY_CRYPTO_HPP_

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "stability/dist.hpp"
#include "stability/rand.hpp"

namespace stability {

struct GMPublicKey {
  mpz_class n;
  mpz_class x;  // (x/p) = (x/q) = -1
};

struct GMSecretKey {
  mpz_class p;
  mpz_class q;
};

struct GMKeys {
  GMPublicKey pk;
  GMSecretKey sk;

  // Distinct primes of exactly prime_bits bits, prime_bits in [4, 64].
  static GMKeys generate(unsigned prime_bits, const RandomTape& tape);
  // x drawn by rejection from the tape.
  static GMKeys from_primes(const mpz_class& p, const mpz_class& q, const RandomTape& tape);
};

inline GMKeys keygen(unsigned prime_bits, const RandomTape& tape) {
  return GMKeys::generate(prime_bits, tape);
}

struct GMCiphertext {
  mpz_class value;
  friend bool operator==(const GMCiphertext& a, const GMCiphertext& b) {
    return a.value == b.value;
  }
};

// Uniform on [0, n) by rejection.
mpz_class uniform_below(const mpz_class& n, TapeReader& reader);
// Uniform on the units mod n.
mpz_class uniform_unit(const mpz_class& n, TapeReader& reader);
mpz_class random_prime(unsigned bits, TapeReader& reader);

GMCiphertext enc(const GMPublicKey& pk, int bit, const RandomTape& tape);
std::optional<int> dec(const GMSecretKey& sk, const GMCiphertext& c);
bool verify(const GMPublicKey& pk, const GMCiphertext& c);
GMCiphertext rerandomize(const GMPublicKey& pk, const GMCiphertext& c, const RandomTape& tape);

// Fixed-width big-endian bytes of the residue, width = byte length of N.
Outcome ciphertext_outcome(const GMPublicKey& pk, const GMCiphertext& c);
// Enumerates the units mod N; requires N < 2^20.
std::vector<mpz_class> units_mod(const mpz_class& n);
FiniteDistribution rerandomize_distribution(const GMPublicKey& pk, const GMCiphertext& c);

inline uint64_t dp_rand_enc_pads(double eps) {
  return static_cast<uint64_t>(std::ceil(1 / eps));
}

// Keeps the valid ciphertexts, adds k = ceil(1/eps) encryptions of each bit
// (pad i of bit b from tape[0, 2i + b]), picks one uniformly with tape[1],
// rerandomizes it with tape[2]. Correct except with probability k/(m+2k)
// on m valid ciphertexts of one bit.
GMCiphertext dp_rand_enc(const GMPublicKey& pk, const std::vector<GMCiphertext>& sample,
                         double eps, const RandomTape& tape);
// Exact output law by enumerating the units mod N.
FiniteDistribution dp_rand_enc_distribution(const GMPublicKey& pk,
                                            const std::vector<GMCiphertext>& sample, double eps);
// Probability the selected ciphertext encrypts 0 and 1, given valid counts.
std::pair<double, double> dp_rand_enc_plaintext_probs(uint64_t zeros, uint64_t ones, uint64_t k);

using Solver = std::function<GMCiphertext(const GMPublicKey&, const std::vector<GMCiphertext>&,
                                          const RandomTape&)>;

// 0-sample from re-randomized encryptions of 0 (tape[0], tape[1, i]),
// challenge sample from re-randomized challenges (tape[2, i]); the solver
// runs on both with tape[3]. Returns 0 iff the outputs match.
int adversary(const GMPublicKey& pk, const GMCiphertext& challenge, const Solver& solver,
              size_t m, const RandomTape& tape);

// Decrypts with the secret key, takes the majority bit (ties to 0) and
// returns enc(pk, bit, tape). Perfectly replicable; for testing only.
Solver cheat_solver(const GMKeys& keys);

struct AdvantageEstimate {
  double advantage = 0;
  double half_width = 0;
  uint64_t trials = 0;
};

// Challenge t encrypts bit t % 2 under tape[t, 0]; the adversary uses
// tape[t, 1]. advantage = P(guess 0 | b = 0) - P(guess 0 | b = 1).
AdvantageEstimate estimate_advantage(const GMPublicKey& pk, const Solver& solver, size_t m,
                                     uint64_t trials, const RandomTape& tape);

}  // namespace stability

#endif  // STABILITY_CRYPTO_HPP_
