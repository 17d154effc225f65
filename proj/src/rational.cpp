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

#include "stability/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace stability {
namespace {

using Int = Rational::Int;

Int abs128(Int x) { return x < 0 ? -x : x; }

Int gcd128(Int a, Int b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int mul(Int a, Int b) {
  Int out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("rational overflow");
  return out;
}

Int add(Int a, Int b) {
  Int out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("rational overflow");
  return out;
}

std::string int_to_string(Int v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  std::string s;
  while (v != 0) {
    int digit = static_cast<int>(v % 10);
    s.insert(s.begin(), static_cast<char>('0' + (digit < 0 ? -digit : digit)));
    v /= 10;
  }
  return neg ? "-" + s : s;
}

}  // namespace

Rational::Rational(Int n, Int d) {
  if (d == 0) throw std::invalid_argument("rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  Int g = gcd128(n, d);
  if (g == 0) g = 1;
  num_ = n / g;
  den_ = d / g;
}

Rational Rational::from_double(double x, int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational: non-finite value");
  bool neg = x < 0;
  double v = std::abs(x);
  // Continued-fraction convergents.
  Int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double rem = v;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(rem);
    if (a > 9e15) break;
    Int ai = static_cast<Int>(a);
    Int p2 = ai * p1 + p0;
    Int q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = rem - a;
    if (frac < 1e-15 || std::abs(static_cast<double>(p1) / static_cast<double>(q1) - v) < 1e-15 * v) {
      break;
    }
    rem = 1.0 / frac;
  }
  if (q1 == 0) throw std::invalid_argument("rational: value out of range");
  return Rational(neg ? -p1 : p1, q1);
}

Rational Rational::dyadic(uint64_t k, unsigned bits) {
  if (bits > 120) throw std::invalid_argument("rational: dyadic exponent too large");
  return Rational(static_cast<Int>(k), static_cast<Int>(1) << bits);
}

double Rational::to_double() const {
  return static_cast<double>(static_cast<long double>(num_) /
                             static_cast<long double>(den_));
}

Int Rational::floor() const {
  Int q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::string Rational::to_string() const {
  if (den_ == 1) return int_to_string(num_);
  return int_to_string(num_) + "/" + int_to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  Int g = gcd128(a.den_, b.den_);
  Int da = a.den_ / g;
  return Rational(add(mul(a.num_, b.den_ / g), mul(b.num_, da)), mul(da, b.den_));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  Int g1 = gcd128(a.num_, b.den_);
  Int g2 = gcd128(b.num_, a.den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  return Rational(mul(a.num_ / g1, b.num_ / g2), mul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("rational: division by zero");
  return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Int l = mul(a.num_, b.den_);
  Int r = mul(b.num_, a.den_);
  return l <=> r;
}

}  // namespace stability
