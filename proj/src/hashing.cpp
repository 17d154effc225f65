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

#include <stdexcept>

namespace stability {
namespace {

void check_dims(unsigned in_bits, unsigned out_bits) {
  if (in_bits == 0 || in_bits > 64 || out_bits == 0 || out_bits > 64) {
    throw std::invalid_argument("hash dimension out of range");
  }
}

}  // namespace

GF2AffineHash::GF2AffineHash(unsigned in_bits, unsigned out_bits,
                             std::vector<uint64_t> columns, uint64_t offset)
    : in_bits_(in_bits),
      out_bits_(out_bits),
      columns_(std::move(columns)),
      offset_(offset) {
  check_dims(in_bits, out_bits);
  if (columns_.size() != in_bits) {
    throw std::invalid_argument("hash: column count differs from in_bits");
  }
  uint64_t mask = low_mask(out_bits);
  for (uint64_t c : columns_) {
    if (c & ~mask) throw std::invalid_argument("hash: column wider than out_bits");
  }
  if (offset_ & ~mask) throw std::invalid_argument("hash: offset wider than out_bits");
}

GF2AffineHash GF2AffineHash::from_rows(unsigned in_bits, unsigned out_bits,
                                       const std::vector<uint64_t>& rows,
                                       uint64_t offset) {
  check_dims(in_bits, out_bits);
  if (rows.size() != out_bits) {
    throw std::invalid_argument("hash: row count differs from out_bits");
  }
  std::vector<uint64_t> cols(in_bits, 0);
  for (unsigned i = 0; i < out_bits; ++i) {
    for (unsigned j = 0; j < in_bits; ++j) {
      if ((rows[i] >> j) & 1) cols[j] |= uint64_t{1} << (out_bits - 1 - i);
    }
  }
  return GF2AffineHash(in_bits, out_bits, std::move(cols), offset);
}

GF2AffineHash GF2AffineHash::identity(unsigned bits) {
  check_dims(bits, bits);
  std::vector<uint64_t> cols(bits);
  for (unsigned j = 0; j < bits; ++j) cols[j] = uint64_t{1} << j;
  return GF2AffineHash(bits, bits, std::move(cols), 0);
}

GF2AffineHash GF2AffineHash::zero(unsigned in_bits, unsigned out_bits,
                                  uint64_t offset) {
  check_dims(in_bits, out_bits);
  return GF2AffineHash(in_bits, out_bits, std::vector<uint64_t>(in_bits, 0),
                       offset);
}

uint64_t GF2AffineHash::row(unsigned i) const {
  uint64_t r = 0;
  for (unsigned j = 0; j < in_bits_; ++j) {
    if ((columns_[j] >> (out_bits_ - 1 - i)) & 1) r |= uint64_t{1} << j;
  }
  return r;
}

BitString GF2AffineHash::apply(const BitString& x) const {
  if (x.size() != in_bits_) {
    throw std::invalid_argument("hash apply: input length differs from in_bits");
  }
  return BitString::from_u64(apply(x.to_u64()), out_bits_);
}

GF2AffineHash sample_hash(unsigned in_bits, unsigned out_bits,
                          TapeReader& reader) {
  check_dims(in_bits, out_bits);
  std::vector<uint64_t> cols(in_bits);
  for (auto& c : cols) c = reader.bits(out_bits);
  uint64_t offset = reader.bits(out_bits);
  return GF2AffineHash(in_bits, out_bits, std::move(cols), offset);
}

GF2AffineHash sample_hash(unsigned in_bits, unsigned out_bits,
                          const RandomTape& tape) {
  TapeReader reader(tape);
  return sample_hash(in_bits, out_bits, reader);
}

}  // namespace stability
