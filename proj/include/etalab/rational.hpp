#pragma once
#include <cstdint>
#include <numeric>
#include <string>

#include "etalab/error.hpp"

namespace etalab {

// Exact rational arithmetic over int64 with __int128 intermediates.  Group
// algebra traces must be exact equalities, so any overflow of the reduced
// representation is an error, never a silent wrap.
struct Rat {
  long long num = 0;
  long long den = 1;  // invariant: den > 0, gcd(|num|, den) = 1

  Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d) { *this = make(n, d); }

  static Rat make(__int128 n, __int128 d) {
    if (d == 0) fail_numeric("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    Rat r;
    r.num = narrow(n);
    r.den = narrow(d);
    return r;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make((__int128)a.num * b.den + (__int128)b.num * a.den, (__int128)a.den * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make((__int128)a.num * b.den - (__int128)b.num * a.den, (__int128)a.den * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make((__int128)a.num * b.num, (__int128)a.den * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) fail_numeric("rational division by zero");
    return make((__int128)a.num * b.den, (__int128)a.den * b.num);
  }
  Rat operator-() const { Rat r; r.num = -num; r.den = den; return r; }
  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

  bool is_zero() const { return num == 0; }
  double to_double() const { return (double)num / (double)den; }
  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }
  static long long narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) fail_numeric("rational overflow: value exceeds 64-bit range");
    return (long long)v;
  }
};

// Complex number with exact rational parts (group algebra coefficients).
struct RatC {
  Rat re, im;

  RatC() = default;
  RatC(Rat r) : re(r) {}
  RatC(Rat r, Rat i) : re(r), im(i) {}
  RatC(long long r) : re(r) {}

  friend RatC operator+(const RatC& a, const RatC& b) { return {a.re + b.re, a.im + b.im}; }
  friend RatC operator-(const RatC& a, const RatC& b) { return {a.re - b.re, a.im - b.im}; }
  friend RatC operator*(const RatC& a, const RatC& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const RatC& a, const RatC& b) { return !(a == b); }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  std::string str() const { return im.is_zero() ? re.str() : re.str() + "+" + im.str() + "i"; }
};

}  // namespace etalab
