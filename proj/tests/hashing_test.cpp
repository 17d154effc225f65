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

#include "stability/hashing.hpp"

#include <gtest/gtest.h>

#include "stability/verify.hpp"

namespace stability {
namespace {

TEST(GF2AffineHashTest, ColumnsAndRowsAgree) {
  // A = [[1,0,1],[0,1,1]], b = 01. Rows packed MSB-first over 3 input bits.
  GF2AffineHash h = GF2AffineHash::from_rows(3, 2, {0b101, 0b011}, 0b01);
  EXPECT_EQ(h.row(0), 0b101u);
  EXPECT_EQ(h.row(1), 0b011u);
  // x = "110" -> A x = (1, 1), + b = "10".
  EXPECT_EQ(h.apply(BitString::from_string("110")).to_string(), "10");
  EXPECT_EQ(h.apply(0b110), 0b10u);
  GF2AffineHash same(3, 2, h.columns(), 0b01);
  for (uint64_t x = 0; x < 8; ++x) EXPECT_EQ(same.apply(x), h.apply(x));
}

TEST(GF2AffineHashTest, IdentityAndZero) {
  auto id = GF2AffineHash::identity(5);
  auto z = GF2AffineHash::zero(5, 3, 0b110);
  for (uint64_t x = 0; x < 32; ++x) {
    EXPECT_EQ(id.apply(x), x);
    EXPECT_EQ(z.apply(x), 0b110u);
  }
}

TEST(GF2AffineHashTest, AffineIdentity) {
  TapeReader r(RandomTape(Seed{}).derive(1));
  for (int t = 0; t < 20; ++t) {
    auto h = sample_hash(10, 7, r);
    for (uint64_t x = 0; x < 1024; x += 37) {
      for (uint64_t y = 0; y < 1024; y += 53) {
        ASSERT_EQ(h.apply(x) ^ h.apply(y) ^ h.offset(), h.apply(x ^ y));
      }
    }
  }
}

TEST(GF2AffineHashTest, RejectsBadShapes) {
  EXPECT_THROW(GF2AffineHash(3, 2, {1, 2}, 0), std::invalid_argument);
  EXPECT_THROW(GF2AffineHash(2, 2, {1, 4}, 0), std::invalid_argument);
  EXPECT_THROW(GF2AffineHash(2, 2, {1, 2}, 4), std::invalid_argument);
}

TEST(SampleHashTest, ReadsColumnsThenOffset) {
  RandomTape t = RandomTape(Seed{7, 7}).derive(0);
  TapeReader r(t);
  std::vector<uint64_t> cols;
  for (int j = 0; j < 4; ++j) cols.push_back(r.bits(3));
  uint64_t off = r.bits(3);
  auto h = sample_hash(4, 3, t);
  EXPECT_EQ(h.columns(), cols);
  EXPECT_EQ(h.offset(), off);
}

TEST(PairwiseIndependenceTest, ExhaustiveSmallFamilies) {
  auto res = check_pairwise_independence(4, 3);
  ASSERT_TRUE(res.pass());
  EXPECT_EQ(res.metrics[0].value, 0);
}

TEST(PairwiseIndependenceTest, SampledPairsAreUniform) {
  // Joint law of (h(3), h(12)) over random members, 4 -> 2 bits.
  std::vector<uint64_t> counts(16, 0);
  for (uint64_t i = 0; i < 32000; ++i) {
    auto h = sample_hash(4, 2, RandomTape(Seed{}).derive({2, i}));
    counts[h.apply(3) * 4 + h.apply(12)]++;
  }
  EXPECT_GT(chi_square_p_value(counts, std::vector<double>(16, 1.0 / 16)), 1e-4);
}

}  // namespace
}  // namespace stability
