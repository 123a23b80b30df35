#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "sumset/errors.hpp"

namespace sumset {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Escalation tiers for boundary-sensitive float work.
using Float50 = boost::multiprecision::cpp_bin_float_50;
using Float100 = boost::multiprecision::cpp_bin_float_100;

inline BigInt floor_rat(const Rational& x) {
  BigInt q = numerator(x) / denominator(x);
  // cpp_int division truncates toward zero; fix up negatives.
  if (x < 0 && q * denominator(x) != numerator(x)) --q;
  return q;
}

inline BigInt ceil_rat(const Rational& x) {
  BigInt q = numerator(x) / denominator(x);
  if (x > 0 && q * denominator(x) != numerator(x)) ++q;
  return q;
}

inline Rational frac_part(const Rational& x) {
  // x - floor(x), always in [0, 1).
  return x - Rational(floor_rat(x));
}

// base^exp for integer exp (negative allowed when base != 0).
inline Rational pow_rat(const Rational& base, const BigInt& exp) {
  if (exp < 0) {
    if (base == 0) throw Error("0 raised to a negative power");
    return Rational(1) / pow_rat(base, -exp);
  }
  Rational acc(1);
  Rational b = base;
  BigInt e = exp;
  while (e > 0) {
    if ((e & 1) != 0) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

inline std::string to_string(const Rational& x) {
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

// Exact value as uint64, or throw. Used where a rational must name a set element.
inline std::uint64_t to_u64(const BigInt& x, const char* what) {
  if (x < 0 || x > BigInt(UINT64_MAX)) throw Error(std::string(what) + ": out of uint64 range");
  return static_cast<std::uint64_t>(x);
}

}  // namespace sumset
