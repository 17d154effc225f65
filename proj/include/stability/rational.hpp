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

#ifndef STABILITY_RATIONAL_HPP_
#define STABILITY_RATIONAL_HPP_

#include <compare>
#include <cstdint>
#include <string>

namespace stability {

// Exact rational over 128-bit integers. Arithmetic throws
// std::overflow_error instead of wrapping.
class Rational {
 public:
  using Int = __int128;

  Rational() = default;
  Rational(int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(Int n, Int d);

  // Best approximation with denominator <= max_den.
  static Rational from_double(double x, int64_t max_den = int64_t{1} << 20);
  // k / 2^bits.
  static Rational dyadic(uint64_t k, unsigned bits);

  Int num() const { return num_; }
  Int den() const { return den_; }
  double to_double() const;
  // Largest integer <= value.
  Int floor() const;
  bool is_integer() const { return den_ == 1; }
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  Int num_ = 0;
  Int den_ = 1;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace stability

#endif  // STABILITY_RATIONAL_HPP_
