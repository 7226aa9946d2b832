#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <utility>

namespace sdof {

/// Exact rational, always canonical (gcd 1, positive denominator).
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

using RationalPoint = std::pair<Rational, Rational>;

inline Rational rat(long long num, long long den = 1) { return Rational(num, den); }

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

/// "n/d", or "n" when the denominator is 1.
std::string to_string(const Rational& r);

/// Parses "n", "n/d" or "-n/d".
Rational parse_rational(const std::string& text);

double to_double(const Rational& r);

}  // namespace sdof
