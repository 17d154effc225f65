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

#ifndef STABILITY_HASHING_HPP_
#define STABILITY_HASHING_HPP_

#include <cstdint>
#include <vector>

#include "stability/rand.hpp"

namespace stability {

// Affine map x -> A x + b over GF(2). Inputs and outputs are packed into
// integers: string position 0 is the most significant bit. Column j of A is
// stored as the output word contributed by input bit j (bit j of the
// integer, counted from the least significant end).
class GF2AffineHash {
 public:
  GF2AffineHash(unsigned in_bits, unsigned out_bits,
                std::vector<uint64_t> columns, uint64_t offset);

  // rows[i] is row i of A as an in_bits-character string packed MSB-first.
  static GF2AffineHash from_rows(unsigned in_bits, unsigned out_bits,
                                 const std::vector<uint64_t>& rows,
                                 uint64_t offset);
  static GF2AffineHash identity(unsigned bits);
  static GF2AffineHash zero(unsigned in_bits, unsigned out_bits,
                            uint64_t offset = 0);

  unsigned in_bits() const { return in_bits_; }
  unsigned out_bits() const { return out_bits_; }
  uint64_t offset() const { return offset_; }
  const std::vector<uint64_t>& columns() const { return columns_; }
  // Row i, packed like from_rows.
  uint64_t row(unsigned i) const;

  uint64_t apply(uint64_t x) const {
    uint64_t acc = offset_;
    while (x) {
      acc ^= columns_[__builtin_ctzll(x)];
      x &= x - 1;
    }
    return acc;
  }
  BitString apply(const BitString& x) const;

 private:
  unsigned in_bits_;
  unsigned out_bits_;
  std::vector<uint64_t> columns_;
  uint64_t offset_;
};

// Columns first (in_bits draws of out_bits bits each), then the offset.
GF2AffineHash sample_hash(unsigned in_bits, unsigned out_bits,
                          TapeReader& reader);
GF2AffineHash sample_hash(unsigned in_bits, unsigned out_bits,
                          const RandomTape& tape);

inline uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
}

}  // namespace stability

#endif  // STABILITY_HASHING_HPP_
