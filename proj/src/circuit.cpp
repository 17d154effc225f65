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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace stability {
namespace {

constexpr uint64_t kTagFailure = 0x6661696cULL;
constexpr unsigned kMaxFileOutBits = 16;

std::string line_error(size_t line, const std::string& what) {
  return "circuit line " + std::to_string(line) + ": " + what;
}

}  // namespace

TruthTableCircuit::TruthTableCircuit(unsigned in_bits, unsigned out_bits,
                                     std::vector<uint64_t> table)
    : in_bits_(in_bits), out_bits_(out_bits), table_(std::move(table)) {
  if (in_bits_ == 0 || in_bits_ > kMaxInBits) {
    throw std::invalid_argument("circuit: in_bits must be in [1, 20]");
  }
  if (out_bits_ == 0 || out_bits_ > 64) {
    throw std::invalid_argument("circuit: out_bits must be in [1, 64]");
  }
  if (table_.size() != (size_t{1} << in_bits_)) {
    throw std::invalid_argument("circuit: table length must be 2^in_bits");
  }
  uint64_t mask = low_mask(out_bits_);
  for (uint64_t y : table_) {
    if (y & ~mask) throw std::invalid_argument("circuit: entry wider than out_bits");
  }
}

FiniteDistribution induced_distribution(const TruthTableCircuit& c) {
  std::map<uint64_t, uint64_t> counts;
  for (uint64_t y : c.table()) ++counts[y];
  std::vector<Outcome> outcomes;
  std::vector<double> probs;
  double scale = std::ldexp(1.0, -static_cast<int>(c.in_bits()));
  for (auto [y, n] : counts) {
    outcomes.push_back(circuit_outcome(y));
    probs.push_back(static_cast<double>(n) * scale);
  }
  return FiniteDistribution(std::move(outcomes), std::move(probs));
}

InverterOracle InverterOracle::with_failure(double rate, Seed seed) {
  if (!(rate >= 0 && rate <= 1)) {
    throw std::invalid_argument("inverter: failure_rate must be in [0, 1]");
  }
  return {InverterStrategy::kBruteForceWithFailure, rate, seed};
}

std::unordered_set<uint64_t> failing_targets(const InverterOracle& oracle,
                                             const TruthTableCircuit& c) {
  std::unordered_set<uint64_t> out;
  if (oracle.exact_inverter()) return out;
  std::vector<uint64_t> image(c.table());
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());
  std::vector<std::pair<uint64_t, uint64_t>> keyed;
  keyed.reserve(image.size());
  for (uint64_t y : image) {
    auto block = philox4x64({y, 0, 0, kTagFailure},
                            {oracle.failure_seed.lo, oracle.failure_seed.hi});
    keyed.emplace_back(block[0], y);
  }
  std::sort(keyed.begin(), keyed.end());
  auto count = static_cast<size_t>(
      std::llround(oracle.failure_rate * static_cast<double>(image.size())));
  for (size_t i = 0; i < count; ++i) out.insert(keyed[i].second);
  return out;
}

std::optional<uint64_t> invert(const InverterOracle& oracle,
                               const TruthTableCircuit& c, uint64_t y,
                               const RandomTape& /*tape*/) {
  if (y & ~low_mask(c.out_bits())) {
    throw std::invalid_argument("invert: target wider than out_bits");
  }
  const auto& table = c.table();
  auto it = std::find(table.begin(), table.end(), y);
  if (it == table.end()) return std::nullopt;
  if (!oracle.exact_inverter() && failing_targets(oracle, c).count(y)) {
    return std::nullopt;
  }
  return static_cast<uint64_t>(it - table.begin());
}

TruthTableCircuit compose_F(const TruthTableCircuit& c, const GF2AffineHash& h1,
                            const GF2AffineHash& h2, unsigned ell) {
  unsigned m = c.in_bits();
  if (ell > m) throw std::invalid_argument("compose_F: ell exceeds in_bits");
  if (h1.in_bits() != c.out_bits() || h1.out_bits() < ell) {
    throw std::invalid_argument("compose_F: h1 dimensions do not match the circuit");
  }
  unsigned k = h1.out_bits() - ell;
  if (h2.in_bits() != m || h2.out_bits() != m - ell + k) {
    throw std::invalid_argument("compose_F: h2 dimensions do not match the circuit");
  }
  unsigned width = h1.out_bits() + h2.out_bits();
  if (width > 64) throw std::invalid_argument("compose_F: output wider than 64 bits");
  std::vector<uint64_t> table(c.table().size());
  for (uint64_t r = 0; r < table.size(); ++r) {
    table[r] = (h1.apply(c(r)) << h2.out_bits()) | h2.apply(r);
  }
  return TruthTableCircuit(m, width, std::move(table));
}

TruthTableCircuit parse_circuit(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty() || lines[0] != "CIRC 1") {
    throw std::invalid_argument(line_error(1, "malformed header, expected 'CIRC 1'"));
  }
  if (lines.size() < 2) {
    throw std::invalid_argument(line_error(2, "malformed header, expected '<m> <n>'"));
  }
  unsigned m = 0, n = 0;
  {
    std::istringstream in{std::string(lines[1])};
    std::string rest;
    if (!(in >> m >> n) || (in >> rest) || lines[1].find_first_not_of("0123456789 ") !=
                                              std::string_view::npos) {
      throw std::invalid_argument(line_error(2, "malformed header, expected '<m> <n>'"));
    }
  }
  if (m == 0 || m > TruthTableCircuit::kMaxInBits || n == 0 || n > kMaxFileOutBits) {
    throw std::invalid_argument(
        line_error(2, "malformed header, need 1 <= m <= 20 and 1 <= n <= 16"));
  }
  size_t rows = size_t{1} << m;
  size_t found = lines.size() - 2;
  if (found != rows) {
    size_t line = found < rows ? lines.size() + 1 : rows + 3;
    throw std::invalid_argument(line_error(
        line, "wrong row count, expected " + std::to_string(rows) +
                  " rows, found " + std::to_string(found)));
  }
  std::vector<uint64_t> table(rows);
  for (size_t r = 0; r < rows; ++r) {
    std::string_view row = lines[r + 2];
    size_t line = r + 3;
    if (row.find_first_not_of("01") != std::string_view::npos || row.empty()) {
      throw std::invalid_argument(line_error(line, "malformed entry"));
    }
    if (row.size() > n) {
      throw std::invalid_argument(line_error(
          line, "over-wide entry, " + std::to_string(row.size()) +
                    " bits for n = " + std::to_string(n)));
    }
    if (row.size() < n) {
      throw std::invalid_argument(line_error(line, "short entry"));
    }
    uint64_t y = 0;
    for (char ch : row) y = (y << 1) | static_cast<uint64_t>(ch == '1');
    table[r] = y;
  }
  return TruthTableCircuit(m, n, std::move(table));
}

std::string emit_circuit(const TruthTableCircuit& c) {
  std::string out = "CIRC 1\n" + std::to_string(c.in_bits()) + " " +
                    std::to_string(c.out_bits()) + "\n";
  for (uint64_t y : c.table()) {
    out += BitString::from_u64(y, c.out_bits()).to_string();
    out += '\n';
  }
  return out;
}

TruthTableCircuit load_circuit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("circuit file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_circuit(buf.str());
}

}  // namespace stability
