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

#ifndef STABILITY_RAND_HPP_
#define STABILITY_RAND_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace stability {

// 128-bit root seed. Parsed from hex, most significant digit first.
struct Seed {
  uint64_t hi = 0;
  uint64_t lo = 0;

  static Seed from_hex(std::string_view hex);
  std::string to_hex() const;

  friend bool operator==(const Seed&, const Seed&) = default;
  friend auto operator<=>(const Seed&, const Seed&) = default;
};

// Philox4x64-10 block function.
inline std::array<uint64_t, 4> philox4x64(std::array<uint64_t, 4> ctr,
                                          std::array<uint64_t, 2> key) {
  constexpr uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  constexpr uint64_t kM1 = 0xCA5A826395121157ULL;
  constexpr uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  constexpr uint64_t kW1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    unsigned __int128 p0 = static_cast<unsigned __int128>(kM0) * ctr[0];
    unsigned __int128 p1 = static_cast<unsigned __int128>(kM1) * ctr[2];
    auto hi0 = static_cast<uint64_t>(p0 >> 64);
    auto lo0 = static_cast<uint64_t>(p0);
    auto hi1 = static_cast<uint64_t>(p1 >> 64);
    auto lo1 = static_cast<uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

// Fixed-length bit string, index 0 is the leftmost character.
class BitString {
 public:
  BitString() = default;
  explicit BitString(size_t size) : size_(size), words_((size + 63) / 64) {}

  static BitString from_string(std::string_view bits);
  // The low `width` bits of v, most significant first.
  static BitString from_u64(uint64_t v, unsigned width);

  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool get(size_t i) const { return (words_[i / 64] >> (63 - i % 64)) & 1; }
  void set(size_t i, bool bit);
  // Requires size() <= 64.
  uint64_t to_u64() const;
  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  size_t size_ = 0;
  std::vector<uint64_t> words_;
};

// An immutable address into the random tape of a root seed. The address is
// a path of call indices. All but the last index are folded into a 128-bit
// id by the PRF; the last index goes into the counter of each block, so a
// leaf stream costs one PRF call per 256 bits.
class RandomTape {
 public:
  explicit RandomTape(Seed seed) : seed_(seed) {}

  RandomTape derive(uint64_t index) const;
  RandomTape derive(std::initializer_list<uint64_t> path) const;

  const Seed& seed() const { return seed_; }
  size_t depth() const { return depth_; }
  // Block j of this stream: 256 bits.
  std::array<uint64_t, 4> block(uint64_t j) const;

  friend bool operator==(const RandomTape&, const RandomTape&) = default;

 private:
  friend class Substreams;

  Seed seed_;
  uint64_t id_lo_ = 0;
  uint64_t id_hi_ = 0;
  uint64_t last_ = 0;
  uint32_t depth_ = 0;
};

// Children of one parent tape with the parent's id computed once;
// child(i) equals parent.derive(i).
class Substreams {
 public:
  explicit Substreams(const RandomTape& parent);
  RandomTape child(uint64_t index) const {
    RandomTape t(base_);
    t.last_ = index;
    return t;
  }

 private:
  RandomTape base_;
};

inline RandomTape derive_stream(const RandomTape& tape, uint64_t index) {
  return tape.derive(index);
}

// Sequential reader over one stream. Bits are consumed most significant
// first within each 64-bit word.
class TapeReader {
 public:
  explicit TapeReader(const RandomTape& tape) : tape_(tape) {}

  // count <= 64; the first drawn bit is the most significant.
  uint64_t bits(unsigned count) {
    unsigned pos = 256 - avail_;
    if (count > 0 && count <= avail_ && (pos % 64) + count <= 64) {
      avail_ -= count;
      consumed_ += count;
      return (buf_[pos / 64] << (pos % 64)) >> (64 - count);
    }
    return bits_slow(count);
  }
  BitString draw_bits(size_t count);
  // k / 2^precision for k drawn with `precision` bits, precision in [1, 64].
  double unit(unsigned precision = 53);
  // The raw numerator of a 53-bit unit draw.
  uint64_t unit53_numerator() { return bits(53); }
  // Uniform on [0, n) by rejection on ceil(log2 n) bits. n >= 1.
  uint64_t below(uint64_t n);
  bool coin() { return bits(1) != 0; }

  uint64_t offset() const { return consumed_; }
  const RandomTape& tape() const { return tape_; }

 private:
  void refill();
  uint64_t bits_slow(unsigned count);

  RandomTape tape_;
  std::array<uint64_t, 4> buf_{};
  uint64_t next_block_ = 0;
  unsigned avail_ = 0;  // unread bits left in buf_
  uint64_t consumed_ = 0;
};

BitString draw_bits(const RandomTape& tape, size_t count);
double draw_unit(const RandomTape& tape, unsigned precision_bits);

// Uniform permutation of 0..n-1 (Fisher-Yates).
std::vector<uint32_t> random_permutation(size_t n, TapeReader& reader);

}  // namespace stability

#endif  // STABILITY_RAND_HPP_
