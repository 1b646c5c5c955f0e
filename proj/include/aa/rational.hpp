#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace aa {

/// Exact distance value: always kept in reduced form by boost::rational.
using Rational = boost::rational<std::int64_t>;

/// Arbitrary-precision rational used for discounted scores d / (1+eps)^len,
/// whose denominators outgrow 64 bits quickly.
using Score = boost::multiprecision::cpp_rational;

Score to_score(const Rational& r);

/// (1 + eps)^len, exact.
Score discount(const Rational& eps, std::size_t len);

/// "p/q", an integer, or a base-10 decimal ("0.05") parsed exactly.
/// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);
std::string to_string(const Score& s);

double to_double(const Score& s);

/// Value rounded half-to-even at three decimals, e.g. 0.5890.. -> 0.589.
double round3(const Score& s);

}  // namespace aa
