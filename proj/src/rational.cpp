#include "aa/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace aa {

using boost::multiprecision::cpp_int;

Score to_score(const Rational& r) { return Score(cpp_int(r.numerator()), cpp_int(r.denominator())); }

Score discount(const Rational& eps, std::size_t len) {
  const Score base = Score(1) + to_score(eps);
  Score out = 1;
  for (std::size_t i = 0; i < len; ++i) out *= base;
  return out;
}

namespace {

std::int64_t parse_int(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  std::int64_t v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("not a number: " + std::string(s));
    if (v > (INT64_MAX - 9) / 10) throw std::invalid_argument("number too large: " + std::string(s));
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational out;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    out = Rational(parse_int(text.substr(0, slash)), den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 17) throw std::invalid_argument("too many decimals: " + std::string(text));
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    if (whole.empty() && frac.empty()) throw std::invalid_argument("not a number: .");
    out = Rational(w) + Rational(f, den);
  } else {
    out = Rational(parse_int(text));
  }
  return negative ? -out : out;
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string to_string(const Score& s) {
  const cpp_int num = boost::multiprecision::numerator(s);
  const cpp_int den = boost::multiprecision::denominator(s);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Score& s) { return s.convert_to<double>(); }

double round3(const Score& s) {
  const Score scaled = s * 1000;
  const cpp_int num = boost::multiprecision::numerator(scaled);
  const cpp_int den = boost::multiprecision::denominator(scaled);
  cpp_int q = num / den;
  cpp_int r = num % den;
  if (r < 0) {
    r += den;
    q -= 1;
  }
  const cpp_int twice = 2 * r;
  if (twice > den || (twice == den && (q % 2 != 0))) q += 1;
  return q.convert_to<double>() / 1000.0;
}

}  // namespace aa
