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

#include <set>

#include <gtest/gtest.h>

#include "stability/verify.hpp"

namespace stability {
namespace {

RandomTape tape(uint64_t i) { return RandomTape(Seed{0, 77}).derive(i); }

TEST(KeygenTest, PrimesAndNonResidue) {
  for (unsigned bits : {4u, 8u, 16u, 32u}) {
    GMKeys k = keygen(bits, tape(bits));
    const auto& p = k.sk.p;
    const auto& q = k.sk.q;
    EXPECT_NE(p, q);
    EXPECT_EQ(mpz_sizeinbase(p.get_mpz_t(), 2), bits);
    EXPECT_EQ(mpz_sizeinbase(q.get_mpz_t(), 2), bits);
    EXPECT_NE(mpz_probab_prime_p(p.get_mpz_t(), 30), 0);
    EXPECT_NE(mpz_probab_prime_p(q.get_mpz_t(), 30), 0);
    EXPECT_EQ(k.pk.n, p * q);
    EXPECT_EQ(mpz_legendre(k.pk.x.get_mpz_t(), p.get_mpz_t()), -1);
    EXPECT_EQ(mpz_legendre(k.pk.x.get_mpz_t(), q.get_mpz_t()), -1);
  }
  EXPECT_THROW(keygen(3, tape(0)), std::invalid_argument);
  EXPECT_THROW(keygen(65, tape(0)), std::invalid_argument);
}

TEST(GMTest, RoundTripAndHomomorphism) {
  GMKeys k = keygen(16, tape(1));
  for (uint64_t i = 0; i < 40; ++i) {
    int a = static_cast<int>(i % 2), b = static_cast<int>(i / 2 % 2);
    auto ca = enc(k.pk, a, tape(100 + i));
    auto cb = enc(k.pk, b, tape(200 + i));
    EXPECT_TRUE(verify(k.pk, ca));
    EXPECT_EQ(dec(k.sk, ca), a);
    EXPECT_EQ(dec(k.sk, rerandomize(k.pk, ca, tape(300 + i))), a);
    GMCiphertext prod{ca.value * cb.value % k.pk.n};
    EXPECT_EQ(dec(k.sk, prod), a ^ b);
  }
  GMCiphertext shared{k.sk.p * 3};
  EXPECT_FALSE(verify(k.pk, shared));
  EXPECT_EQ(dec(k.sk, shared), std::nullopt);
}

TEST(GMTest, RerandomizationIsUniformOnTheCoset) {
  GMKeys k = GMKeys::from_primes(7, 11, tape(2));
  // 60 units, each square hit 4 times: 15 outputs of mass 1/15.
  EXPECT_EQ(units_mod(k.pk.n).size(), 60u);
  for (int b = 0; b < 2; ++b) {
    auto d = rerandomize_distribution(k.pk, enc(k.pk, b, tape(3 + b)));
    ASSERT_EQ(d.size(), 15u);
    for (double p : d.probs()) EXPECT_NEAR(p, 1.0 / 15, 1e-15);
  }
  EXPECT_TRUE(check_rerandomization(7, 11, tape(4)).pass());
  EXPECT_TRUE(check_rerandomization(11, 13, tape(5)).pass());
}

TEST(GMTest, OutcomeWidthIsFixed) {
  GMKeys k = GMKeys::from_primes(251, 241, tape(6));
  EXPECT_EQ(ciphertext_outcome(k.pk, {mpz_class(3)}).size(), 2u);
  EXPECT_EQ(ciphertext_outcome(k.pk, {mpz_class(60000)}).size(), 2u);
}

TEST(RandomPrimeTest, HasExactWidth) {
  TapeReader r(tape(7));
  for (int i = 0; i < 20; ++i) {
    mpz_class p = random_prime(5, r);
    EXPECT_GE(p, 16);
    EXPECT_LT(p, 32);
    EXPECT_NE(mpz_probab_prime_p(p.get_mpz_t(), 30), 0);
  }
}

TEST(DPRandEncTest, PlaintextProbabilities) {
  auto [p0, p1] = dp_rand_enc_plaintext_probs(6, 0, 2);
  EXPECT_DOUBLE_EQ(p0, 0.8);
  EXPECT_DOUBLE_EQ(p1, 0.2);
  EXPECT_EQ(dp_rand_enc_pads(0.5), 2u);
  EXPECT_EQ(dp_rand_enc_pads(0.3), 4u);
}

TEST(DPRandEncTest, RunsMatchExactLaw) {
  GMKeys k = GMKeys::from_primes(7, 11, tape(8));
  std::vector<GMCiphertext> s = {enc(k.pk, 0, tape(9)), enc(k.pk, 1, tape(10)),
                                 enc(k.pk, 0, tape(11)), GMCiphertext{mpz_class(14)}};
  auto exact = dp_rand_enc_distribution(k.pk, s, 0.5);
  std::vector<Outcome> runs;
  for (uint64_t t = 0; t < 30000; ++t) {
    runs.push_back(ciphertext_outcome(k.pk, dp_rand_enc(k.pk, s, 0.5, RandomTape(Seed{}).derive({12, t}))));
  }
  auto emp = normalize(empirical(runs));
  std::vector<Outcome> u = exact.outcomes();
  for (const auto& o : emp.outcomes()) {
    if (!exact.index_of(o)) u.push_back(o);
  }
  EXPECT_LT(tv_distance(align(exact, u), align(emp, u)), 0.03);
}

TEST(DPRandEncTest, ExactPrivacyCheck) {
  auto res = check_dp_rand_enc({}, tape(13));
  EXPECT_TRUE(res.pass());
  EXPECT_EQ(res.notes.at("failure_probability"), "1/5");
  EXPECT_EQ(res.notes.at("dp_ratio_max"), "3/2");
}

TEST(AdversaryTest, CheatSolverWins) {
  GMKeys k = keygen(12, tape(14));
  auto est = estimate_advantage(k.pk, cheat_solver(k), 6, 100, tape(15));
  EXPECT_GE(est.advantage, 0.99);
  EXPECT_EQ(est.trials, 100u);
}

TEST(AdversaryTest, NonReplicableSolverHasNoAdvantage) {
  GMKeys k = keygen(16, tape(16));
  Solver first = [](const GMPublicKey& pk, const std::vector<GMCiphertext>& s, const RandomTape& t) {
    return rerandomize(pk, s.front(), t);
  };
  auto est = estimate_advantage(k.pk, first, 6, 200, tape(17));
  EXPECT_LT(std::abs(est.advantage), 0.1);
}

}  // namespace
}  // namespace stability
