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
#include <stdexcept>

namespace stability {
namespace {

// Last counter word: derivation uses 0, draws set the top bit plus a flag
// for non-root streams, with the block index below.
constexpr uint64_t kDrawFlag = uint64_t{1} << 63;
constexpr uint64_t kChildFlag = uint64_t{1} << 62;

constexpr size_t kMaxDrawBits = size_t{1} << 20;

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Seed Seed::from_hex(std::string_view hex) {
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) {
    hex.remove_prefix(2);
  }
  if (hex.empty() || hex.size() > 32) {
    throw std::invalid_argument("seed: expected 1 to 32 hex digits");
  }
  Seed s;
  for (char c : hex) {
    int v = hex_value(c);
    if (v < 0) throw std::invalid_argument("seed: invalid hex digit");
    s.hi = (s.hi << 4) | (s.lo >> 60);
    s.lo = (s.lo << 4) | static_cast<uint64_t>(v);
  }
  return s;
}

std::string Seed::to_hex() const {
  static const char* kDigits = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kDigits[(hi >> (4 * i)) & 0xF];
    out[31 - i] = kDigits[(lo >> (4 * i)) & 0xF];
  }
  return out;
}

BitString BitString::from_string(std::string_view bits) {
  BitString out(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw std::invalid_argument("bit string: invalid character");
    }
    out.set(i, bits[i] == '1');
  }
  return out;
}

BitString BitString::from_u64(uint64_t v, unsigned width) {
  if (width > 64) throw std::invalid_argument("bit string: width > 64");
  BitString out(width);
  for (unsigned i = 0; i < width; ++i) out.set(i, (v >> (width - 1 - i)) & 1);
  return out;
}

void BitString::set(size_t i, bool bit) {
  uint64_t mask = uint64_t{1} << (63 - i % 64);
  if (bit) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

uint64_t BitString::to_u64() const {
  if (size_ > 64) throw std::invalid_argument("bit string: longer than 64");
  if (size_ == 0) return 0;
  return words_[0] >> (64 - size_);
}

std::string BitString::to_string() const {
  std::string out(size_, '0');
  for (size_t i = 0; i < size_; ++i) {
    if (get(i)) out[i] = '1';
  }
  return out;
}

RandomTape RandomTape::derive(uint64_t index) const {
  RandomTape child(*this);
  if (depth_ > 0) {
    auto id = philox4x64({id_lo_, id_hi_, last_, 0}, {seed_.lo, seed_.hi});
    child.id_lo_ = id[0];
    child.id_hi_ = id[1];
  }
  child.last_ = index;
  child.depth_ = depth_ + 1;
  return child;
}

Substreams::Substreams(const RandomTape& parent) : base_(parent.derive(0)) {}

RandomTape RandomTape::derive(std::initializer_list<uint64_t> path) const {
  RandomTape t(*this);
  for (uint64_t i : path) t = t.derive(i);
  return t;
}

std::array<uint64_t, 4> RandomTape::block(uint64_t j) const {
  if (j >= kChildFlag) throw std::out_of_range("block index exceeds 2^62");
  uint64_t tag = kDrawFlag | (depth_ > 0 ? kChildFlag : 0) | j;
  return philox4x64({id_lo_, id_hi_, last_, tag}, {seed_.lo, seed_.hi});
}

void TapeReader::refill() {
  buf_ = tape_.block(next_block_++);
  avail_ = 256;
}

uint64_t TapeReader::bits_slow(unsigned count) {
  if (count > 64) throw std::invalid_argument("bits: count > 64");
  consumed_ += count;
  uint64_t result = 0;
  while (count > 0) {
    if (avail_ == 0) refill();
    unsigned pos = 256 - avail_;
    unsigned w = pos / 64;
    unsigned o = pos % 64;
    unsigned take = std::min(count, 64 - o);
    uint64_t chunk = (buf_[w] << o) >> (64 - take);
    result = take == 64 ? chunk : (result << take) | chunk;
    avail_ -= take;
    count -= take;
  }
  return result;
}

BitString TapeReader::draw_bits(size_t count) {
  if (count > kMaxDrawBits) {
    throw std::invalid_argument("draw_bits: count exceeds 2^20");
  }
  BitString out(count);
  size_t i = 0;
  while (i < count) {
    unsigned take = static_cast<unsigned>(std::min<size_t>(64, count - i));
    uint64_t v = bits(take);
    for (unsigned b = 0; b < take; ++b) {
      out.set(i + b, (v >> (take - 1 - b)) & 1);
    }
    i += take;
  }
  return out;
}

double TapeReader::unit(unsigned precision) {
  if (precision < 1 || precision > 64) {
    throw std::invalid_argument("unit: precision must be in [1, 64]");
  }
  return std::ldexp(static_cast<double>(bits(precision)),
                    -static_cast<int>(precision));
}

uint64_t TapeReader::below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("below: n must be positive");
  if (n == 1) return 0;
  unsigned width = 64 - static_cast<unsigned>(__builtin_clzll(n - 1));
  for (;;) {
    uint64_t v = bits(width);
    if (v < n) return v;
  }
}

BitString draw_bits(const RandomTape& tape, size_t count) {
  TapeReader r(tape);
  return r.draw_bits(count);
}

double draw_unit(const RandomTape& tape, unsigned precision_bits) {
  TapeReader r(tape);
  return r.unit(precision_bits);
}

std::vector<uint32_t> random_permutation(size_t n, TapeReader& reader) {
  std::vector<uint32_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = static_cast<uint32_t>(i);
  for (size_t i = n; i > 1; --i) {
    size_t j = reader.below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace stability
