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

#include "stability/circuit.hpp"

#include <gtest/gtest.h>

namespace stability {
namespace {

const char* kSmall =
    "CIRC 1\n"
    "2 3\n"
    "101\n"
    "000\n"
    "101\n"
    "111\n";

TEST(CircuitParseTest, RoundTrip) {
  auto c = parse_circuit(kSmall);
  EXPECT_EQ(c.in_bits(), 2u);
  EXPECT_EQ(c.out_bits(), 3u);
  EXPECT_EQ(c.table(), (std::vector<uint64_t>{5, 0, 5, 7}));
  EXPECT_EQ(emit_circuit(c), kSmall);
  EXPECT_EQ(parse_circuit("CIRC 1\r\n1 1\r\n0\r\n1\r\n").table(), (std::vector<uint64_t>{0, 1}));
}

void expect_error(const std::string& text, const std::string& needle) {
  try {
    parse_circuit(text);
    FAIL() << "accepted: " << text;
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(CircuitParseTest, ErrorsNameTheLine) {
  expect_error("CIRC 2\n1 1\n0\n1\n", "line 1");
  expect_error("CIRC 1\n1\n0\n1\n", "line 2");
  expect_error("CIRC 1\n21 1\n", "line 2");
  expect_error("CIRC 1\n1 2\n01\n0x\n", "line 4: malformed entry");
  expect_error("CIRC 1\n1 2\n011\n00\n", "line 3: over-wide");
  expect_error("CIRC 1\n1 2\n01\n0\n", "line 4: short entry");
  expect_error("CIRC 1\n2 1\n0\n1\n", "wrong row count");
}

TEST(InducedDistributionTest, CountsPreimages) {
  auto d = induced_distribution(parse_circuit(kSmall));
  EXPECT_DOUBLE_EQ(d.prob(circuit_outcome(5)), 0.5);
  EXPECT_DOUBLE_EQ(d.prob(circuit_outcome(0)), 0.25);
  EXPECT_DOUBLE_EQ(d.prob(circuit_outcome(7)), 0.25);
  EXPECT_DOUBLE_EQ(d.prob(circuit_outcome(1)), 0);
}

TEST(InverterTest, LeastPreimage) {
  auto c = parse_circuit(kSmall);
  RandomTape t(Seed{});
  auto o = InverterOracle::exact();
  EXPECT_EQ(invert(o, c, 5, t), 0u);
  EXPECT_EQ(invert(o, c, 7, t), 3u);
  EXPECT_EQ(invert(o, c, 2, t), std::nullopt);
  EXPECT_THROW(invert(o, c, 8, t), std::invalid_argument);
}

TEST(InverterTest, FailureOracleDropsAFixedFraction) {
  std::vector<uint64_t> table(256);
  for (uint64_t r = 0; r < 256; ++r) table[r] = r % 100;
  TruthTableCircuit c(8, 7, table);
  auto o = InverterOracle::with_failure(0.3, Seed{0, 11});
  auto failing = failing_targets(o, c);
  EXPECT_EQ(failing.size(), 30u);
  EXPECT_EQ(failing, failing_targets(o, c));
  for (uint64_t y = 0; y < 100; ++y) {
    EXPECT_EQ(invert(o, c, y, RandomTape(Seed{})).has_value(), failing.count(y) == 0);
  }
  EXPECT_THROW(InverterOracle::with_failure(1.5, Seed{}), std::invalid_argument);
}

TEST(ComposeTest, ConcatenatesHashes) {
  auto c = parse_circuit(kSmall);
  // ell = 1, k = 1: h1 maps 3 -> 2 bits, h2 maps 2 -> 2 bits.
  auto h1 = GF2AffineHash::from_rows(3, 2, {0b100, 0b011}, 0b01);
  auto h2 = GF2AffineHash::from_rows(2, 2, {0b10, 0b11}, 0);
  auto f = compose_F(c, h1, h2, 1);
  EXPECT_EQ(f.out_bits(), 4u);
  for (uint64_t r = 0; r < 4; ++r) EXPECT_EQ(f(r), (h1.apply(c(r)) << 2) | h2.apply(r));
  EXPECT_THROW(compose_F(c, h1, h2, 3), std::invalid_argument);
}

}  // namespace
}  // namespace stability
