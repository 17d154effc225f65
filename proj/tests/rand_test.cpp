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

#include "stability/rand.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "stability/dist.hpp"

namespace stability {
namespace {

using Block = std::array<uint64_t, 4>;

// Published known-answer vectors for Philox4x64-10.
TEST(PhiloxTest, KnownAnswers) {
  EXPECT_EQ(philox4x64({0, 0, 0, 0}, {0, 0}),
            (Block{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL,
                   0x7e68b68aec7ba23bULL}));
  EXPECT_EQ(philox4x64({~0ULL, ~0ULL, ~0ULL, ~0ULL}, {~0ULL, ~0ULL}),
            (Block{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL,
                   0xa09caebf594f0ba0ULL}));
  EXPECT_EQ(philox4x64({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
                        0x082efa98ec4e6c89ULL},
                       {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}),
            (Block{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL,
                   0x57bd43b5e52b7fe6ULL}));
}

TEST(SeedTest, HexRoundTrip) {
  Seed s = Seed::from_hex("0x0123456789abcdefFEDCBA9876543210");
  EXPECT_EQ(s.hi, 0x0123456789abcdefULL);
  EXPECT_EQ(s.lo, 0xfedcba9876543210ULL);
  EXPECT_EQ(Seed::from_hex(s.to_hex()), s);
  EXPECT_EQ(Seed::from_hex("00"), Seed{});
  EXPECT_EQ(Seed::from_hex("1f").lo, 0x1fULL);
}

TEST(SeedTest, RejectsBadHex) {
  EXPECT_THROW(Seed::from_hex(""), std::invalid_argument);
  EXPECT_THROW(Seed::from_hex("xyz"), std::invalid_argument);
  EXPECT_THROW(Seed::from_hex(std::string(33, '1')), std::invalid_argument);
}

TEST(RandomTapeTest, EqualPathsGiveEqualStreams) {
  RandomTape root(Seed{1, 2});
  EXPECT_EQ(root.derive({3, 4, 5}), root.derive(3).derive(4).derive(5));
  EXPECT_EQ(root.derive({3, 4}).block(7), root.derive(3).derive(4).block(7));
  EXPECT_EQ(RandomTape(Seed{1, 2}).derive(9).block(0), root.derive(9).block(0));
}

TEST(RandomTapeTest, DistinctPathsDiffer) {
  RandomTape root(Seed{0, 42});
  std::set<Block> seen;
  std::vector<RandomTape> tapes = {root,
                                   root.derive(0),
                                   root.derive(1),
                                   root.derive({0, 0}),
                                   root.derive({0, 1}),
                                   root.derive({1, 0}),
                                   root.derive({0, 0, 0}),
                                   RandomTape(Seed{0, 43}).derive(0)};
  for (const auto& t : tapes) {
    EXPECT_TRUE(seen.insert(t.block(0)).second);
    EXPECT_TRUE(seen.insert(t.block(1)).second);
  }
}

TEST(RandomTapeTest, SubstreamsMatchDerive) {
  RandomTape parent = RandomTape(Seed{5, 6}).derive({1, 2});
  Substreams subs(parent);
  for (uint64_t i : {0ULL, 1ULL, 77ULL, 1ULL << 40}) {
    EXPECT_EQ(subs.child(i).block(0), parent.derive(i).block(0));
    EXPECT_EQ(subs.child(i).block(3), parent.derive(i).block(3));
  }
}

TEST(TapeReaderTest, BitsAreMostSignificantFirst) {
  RandomTape t = RandomTape(Seed{}).derive(1);
  Block b0 = t.block(0), b1 = t.block(1);
  TapeReader r(t);
  EXPECT_EQ(r.bits(1), b0[0] >> 63);
  EXPECT_EQ(r.bits(3), (b0[0] >> 60) & 7);
  EXPECT_EQ(r.bits(60), b0[0] & ((1ULL << 60) - 1));
  // Straddles words 1 and 2.
  EXPECT_EQ(r.bits(60), b0[1] >> 4);
  EXPECT_EQ(r.bits(8), ((b0[1] & 0xF) << 4) | (b0[2] >> 60));
  EXPECT_EQ(r.offset(), 132u);
  r.bits(60);
  r.bits(64);
  EXPECT_EQ(r.bits(64), b1[0]);
}

TEST(TapeReaderTest, DrawBitsMatchesBits) {
  RandomTape t = RandomTape(Seed{3, 3}).derive(0);
  BitString s = draw_bits(t, 300);
  TapeReader r(t);
  for (size_t i = 0; i < 300; ++i) ASSERT_EQ(s.get(i), r.coin()) << i;
}

TEST(TapeReaderTest, UnitUsesRequestedPrecision) {
  RandomTape t = RandomTape(Seed{}).derive(2);
  TapeReader a(t), b(t);
  uint64_t k = a.bits(53);
  EXPECT_DOUBLE_EQ(b.unit(), std::ldexp(static_cast<double>(k), -53));
  EXPECT_DOUBLE_EQ(draw_unit(t, 4), static_cast<double>(t.block(0)[0] >> 60) / 16);
  EXPECT_THROW(b.unit(0), std::invalid_argument);
}

TEST(TapeReaderTest, BelowIsUniform) {
  TapeReader r(RandomTape(Seed{}).derive(3));
  std::vector<uint64_t> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    uint64_t v = r.below(7);
    ASSERT_LT(v, 7u);
    counts[v]++;
  }
  std::vector<double> p(7, 1.0 / 7);
  EXPECT_GT(chi_square_p_value(counts, p), 1e-4);
  EXPECT_EQ(r.below(1), 0u);
  EXPECT_THROW(r.below(0), std::invalid_argument);
}

TEST(RandomPermutationTest, AllOrdersEquallyLikely) {
  std::map<std::vector<uint32_t>, uint64_t> freq;
  for (uint64_t i = 0; i < 24000; ++i) {
    TapeReader r(RandomTape(Seed{}).derive({4, i}));
    auto p = random_permutation(4, r);
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    ASSERT_EQ(sorted, (std::vector<uint32_t>{0, 1, 2, 3}));
    freq[p]++;
  }
  ASSERT_EQ(freq.size(), 24u);
  std::vector<uint64_t> counts;
  for (const auto& [k, v] : freq) counts.push_back(v);
  EXPECT_GT(chi_square_p_value(counts, std::vector<double>(24, 1.0 / 24)), 1e-4);
}

TEST(BitStringTest, RoundTrips) {
  BitString b = BitString::from_string("1011001");
  EXPECT_EQ(b.to_string(), "1011001");
  EXPECT_EQ(b.to_u64(), 0b1011001u);
  EXPECT_EQ(BitString::from_u64(5, 6).to_string(), "000101");
  EXPECT_THROW(BitString::from_string("10a"), std::invalid_argument);
}

}  // namespace
}  // namespace stability
