#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sumrule {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

inline Rational pow(const Rational &base, int exponent) {
  if (exponent < 0)
    return Rational(1) / pow(base, -exponent);
  Rational result = 1;
  Rational b = base;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1u)
      result *= b;
    e >>= 1u;
    if (e != 0)
      b *= b;
  }
  return result;
}

/// n! for small non-negative n, cached.
inline const Integer &factorial(int n) {
  static thread_local std::vector<Integer> cache{Integer(1)};
  while (static_cast<int>(cache.size()) <= n)
    cache.push_back(cache.back() * Integer(cache.size()));
  return cache[static_cast<std::size_t>(n)];
}

inline std::optional<Integer> exact_isqrt(const Integer &v) {
  if (v < 0)
    return std::nullopt;
  Integer r = boost::multiprecision::sqrt(v);
  if (r * r != v)
    return std::nullopt;
  return r;
}

/// Square root of a non-negative rational when it is itself rational.
inline std::optional<Rational> exact_sqrt(const Rational &v) {
  auto n = exact_isqrt(boost::multiprecision::numerator(v));
  auto d = exact_isqrt(boost::multiprecision::denominator(v));
  if (!n || !d)
    return std::nullopt;
  return Rational(*n, *d);
}

inline double to_double(const Rational &v) { return v.convert_to<double>(); }

/// "p/q" (or "p" when q == 1).
inline std::string to_string(const Rational &v) {
  auto num = boost::multiprecision::numerator(v);
  auto den = boost::multiprecision::denominator(v);
  if (den == 1)
    return num.str();
  return num.str() + "/" + den.str();
}

inline Rational parse_rational(const std::string &s) {
  auto slash = s.find('/');
  if (slash == std::string::npos)
    return Rational(Integer(s));
  return Rational(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
}

} // namespace sumrule
