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

#include "stability/crypto.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "stability/parallel.hpp"

namespace stability {
namespace {

constexpr int kPrimeBudget = 100000;
constexpr int kNonResidueBudget = 10000;

mpz_class mulmod(const mpz_class& a, const mpz_class& b, const mpz_class& n) {
  mpz_class r = a * b;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
  return r;
}

bool is_unit(const mpz_class& c, const mpz_class& n) {
  if (c <= 0 || c >= n) return false;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), n.get_mpz_t());
  return g == 1;
}

}  // namespace

mpz_class uniform_below(const mpz_class& n, TapeReader& reader) {
  if (n <= 0) throw std::invalid_argument("uniform_below: bound must be positive");
  size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  while (true) {
    mpz_class v = 0;
    size_t left = bits;
    while (left > 0) {
      auto take = static_cast<unsigned>(std::min<size_t>(left, 64));
      uint64_t chunk = reader.bits(take);
      v <<= take;
      mpz_class c;
      mpz_import(c.get_mpz_t(), 1, 1, sizeof(chunk), 0, 0, &chunk);
      v += c;
      left -= take;
    }
    if (v < n) return v;
  }
}

mpz_class uniform_unit(const mpz_class& n, TapeReader& reader) {
  while (true) {
    mpz_class v = uniform_below(n, reader);
    if (is_unit(v, n)) return v;
  }
}

mpz_class random_prime(unsigned bits, TapeReader& reader) {
  if (bits < 4 || bits > 64) throw std::invalid_argument("prime_bits must lie in [4, 64]");
  for (int i = 0; i < kPrimeBudget; ++i) {
    uint64_t v = reader.bits(bits);
    v |= uint64_t{1} << (bits - 1);
    v |= 1;
    mpz_class c;
    mpz_import(c.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
    if (mpz_probab_prime_p(c.get_mpz_t(), 40) > 0) return c;
  }
  throw std::runtime_error("prime search exhausted");
}

GMKeys GMKeys::generate(unsigned prime_bits, const RandomTape& tape) {
  TapeReader rp(tape.derive(0));
  mpz_class p = random_prime(prime_bits, rp);
  TapeReader rq(tape.derive(1));
  mpz_class q;
  for (int i = 0;; ++i) {
    if (i == kPrimeBudget) throw std::runtime_error("prime search exhausted");
    q = random_prime(prime_bits, rq);
    if (q != p) break;
  }
  return from_primes(p, q, tape.derive(2));
}

GMKeys GMKeys::from_primes(const mpz_class& p, const mpz_class& q, const RandomTape& tape) {
  if (p == q) throw std::invalid_argument("keygen: primes must be distinct");
  for (const auto* v : {&p, &q}) {
    if (*v < 3 || mpz_probab_prime_p(v->get_mpz_t(), 40) == 0) {
      throw std::invalid_argument("keygen: p and q must be odd primes");
    }
  }
  GMKeys k;
  k.sk = {p, q};
  k.pk.n = p * q;
  TapeReader r(tape);
  for (int i = 0; i < kNonResidueBudget; ++i) {
    mpz_class x = uniform_unit(k.pk.n, r);
    if (mpz_legendre(x.get_mpz_t(), p.get_mpz_t()) == -1 &&
        mpz_legendre(x.get_mpz_t(), q.get_mpz_t()) == -1) {
      k.pk.x = x;
      return k;
    }
  }
  throw std::runtime_error("non-residue search exhausted");
}

GMCiphertext enc(const GMPublicKey& pk, int bit, const RandomTape& tape) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("enc: bit must be 0 or 1");
  TapeReader r(tape);
  mpz_class u = uniform_unit(pk.n, r);
  mpz_class c = mulmod(u, u, pk.n);
  if (bit) c = mulmod(c, pk.x, pk.n);
  return {c};
}

std::optional<int> dec(const GMSecretKey& sk, const GMCiphertext& c) {
  mpz_class n = sk.p * sk.q;
  mpz_class v = c.value % n;
  if (v < 0) v += n;
  if (!is_unit(v, n)) return std::nullopt;
  bool qr = mpz_legendre(v.get_mpz_t(), sk.p.get_mpz_t()) == 1 &&
            mpz_legendre(v.get_mpz_t(), sk.q.get_mpz_t()) == 1;
  return qr ? 0 : 1;
}

bool verify(const GMPublicKey& pk, const GMCiphertext& c) { return is_unit(c.value, pk.n); }

GMCiphertext rerandomize(const GMPublicKey& pk, const GMCiphertext& c, const RandomTape& tape) {
  TapeReader r(tape);
  mpz_class u = uniform_unit(pk.n, r);
  return {mulmod(c.value, mulmod(u, u, pk.n), pk.n)};
}

Outcome ciphertext_outcome(const GMPublicKey& pk, const GMCiphertext& c) {
  size_t width = (mpz_sizeinbase(pk.n.get_mpz_t(), 2) + 7) / 8;
  std::string out(width, '\0');
  size_t count = 0;
  std::string buf(std::max<size_t>(width, mpz_sizeinbase(c.value.get_mpz_t(), 256)), '\0');
  mpz_export(buf.data(), &count, 1, 1, 1, 0, c.value.get_mpz_t());
  if (count > width) throw std::invalid_argument("ciphertext wider than the modulus");
  std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(count),
            out.begin() + static_cast<std::ptrdiff_t>(width - count));
  return out;
}

std::vector<mpz_class> units_mod(const mpz_class& n) {
  if (n >= (1 << 20) || n < 2) throw std::invalid_argument("units_mod: modulus out of range");
  std::vector<mpz_class> out;
  for (unsigned long v = 1; v < n.get_ui(); ++v) {
    if (is_unit(mpz_class(v), n)) out.emplace_back(v);
  }
  return out;
}

FiniteDistribution rerandomize_distribution(const GMPublicKey& pk, const GMCiphertext& c) {
  auto units = units_mod(pk.n);
  std::map<Outcome, double> mass;
  double w = 1.0 / static_cast<double>(units.size());
  for (const auto& u : units) {
    mass[ciphertext_outcome(pk, {mulmod(c.value, mulmod(u, u, pk.n), pk.n)})] += w;
  }
  std::vector<Outcome> outs;
  std::vector<double> probs;
  for (const auto& [o, p] : mass) {
    outs.push_back(o);
    probs.push_back(p);
  }
  return FiniteDistribution(std::move(outs), std::move(probs));
}

GMCiphertext dp_rand_enc(const GMPublicKey& pk, const std::vector<GMCiphertext>& sample,
                         double eps, const RandomTape& tape) {
  if (!(eps > 0)) throw std::invalid_argument("dp_rand_enc: eps must be positive");
  uint64_t k = dp_rand_enc_pads(eps);
  std::vector<GMCiphertext> pool;
  for (const auto& c : sample) {
    if (verify(pk, c)) pool.push_back(c);
  }
  RandomTape pads = tape.derive(0);
  for (uint64_t i = 0; i < k; ++i) {
    pool.push_back(enc(pk, 0, pads.derive(2 * i)));
    pool.push_back(enc(pk, 1, pads.derive(2 * i + 1)));
  }
  TapeReader pick(tape.derive(1));
  const auto& chosen = pool[pick.below(pool.size())];
  return rerandomize(pk, chosen, tape.derive(2));
}

FiniteDistribution dp_rand_enc_distribution(const GMPublicKey& pk,
                                            const std::vector<GMCiphertext>& sample,
                                            double eps) {
  if (!(eps > 0)) throw std::invalid_argument("dp_rand_enc: eps must be positive");
  uint64_t k = dp_rand_enc_pads(eps);
  std::vector<GMCiphertext> pool;
  for (const auto& c : sample) {
    if (verify(pk, c)) pool.push_back(c);
  }
  // Re-randomized pads are uniform on their plaintext class, as are these.
  for (uint64_t i = 0; i < k; ++i) {
    pool.push_back({1});
    pool.push_back({pk.x});
  }
  auto units = units_mod(pk.n);
  std::map<Outcome, double> mass;
  double w = 1.0 / static_cast<double>(pool.size() * units.size());
  for (const auto& c : pool) {
    for (const auto& u : units) {
      mass[ciphertext_outcome(pk, {mulmod(c.value, mulmod(u, u, pk.n), pk.n)})] += w;
    }
  }
  std::vector<Outcome> outs;
  std::vector<double> probs;
  for (const auto& [o, p] : mass) {
    outs.push_back(o);
    probs.push_back(p);
  }
  return FiniteDistribution(std::move(outs), std::move(probs));
}

std::pair<double, double> dp_rand_enc_plaintext_probs(uint64_t zeros, uint64_t ones, uint64_t k) {
  auto total = static_cast<double>(zeros + ones + 2 * k);
  return {static_cast<double>(zeros + k) / total, static_cast<double>(ones + k) / total};
}

int adversary(const GMPublicKey& pk, const GMCiphertext& challenge, const Solver& solver,
              size_t m, const RandomTape& tape) {
  GMCiphertext zero = enc(pk, 0, tape.derive(0));
  std::vector<GMCiphertext> s0, s1;
  for (size_t i = 0; i < m; ++i) {
    s0.push_back(rerandomize(pk, zero, tape.derive({1, i})));
    s1.push_back(rerandomize(pk, challenge, tape.derive({2, i})));
  }
  RandomTape coins = tape.derive(3);
  return solver(pk, s0, coins) == solver(pk, s1, coins) ? 0 : 1;
}

Solver cheat_solver(const GMKeys& keys) {
  return [sk = keys.sk](const GMPublicKey& pk, const std::vector<GMCiphertext>& sample,
                        const RandomTape& tape) {
    size_t ones = 0, valid = 0;
    for (const auto& c : sample) {
      auto b = dec(sk, c);
      if (!b) continue;
      ++valid;
      ones += static_cast<size_t>(*b);
    }
    int bit = 2 * ones > valid ? 1 : 0;
    return enc(pk, bit, tape);
  };
}

AdvantageEstimate estimate_advantage(const GMPublicKey& pk, const Solver& solver, size_t m,
                                     uint64_t trials, const RandomTape& tape) {
  if (trials < 2) throw std::invalid_argument("estimate_advantage: need at least 2 trials");
  std::vector<int> guess(trials);
  parallel_for(trials, [&](uint64_t t) {
    int b = static_cast<int>(t % 2);
    GMCiphertext ch = enc(pk, b, tape.derive({t, 0}));
    guess[t] = adversary(pk, ch, solver, m, tape.derive({t, 1}));
  });
  uint64_t n0 = 0, n1 = 0, z0 = 0, z1 = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    if (t % 2 == 0) {
      ++n0;
      z0 += guess[t] == 0;
    } else {
      ++n1;
      z1 += guess[t] == 0;
    }
  }
  double p0 = static_cast<double>(z0) / static_cast<double>(n0);
  double p1 = static_cast<double>(z1) / static_cast<double>(n1);
  AdvantageEstimate e;
  e.advantage = p0 - p1;
  e.half_width = std::hypot(wald_half_width(p0, n0), wald_half_width(p1, n1));
  e.trials = trials;
  return e;
}

}  // namespace stability
