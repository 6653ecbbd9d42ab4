#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace permuton {

/// Exact rational number used for all model geometry and certificates.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Largest integer not exceeding r.
inline BigInt floor_of(const Rational& r) {
  BigInt n = numerator_of(r);
  BigInt d = denominator_of(r);
  BigInt q = n / d;  // truncates toward zero
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

/// "p/q" in lowest terms with q > 0; integers are written "p/1".
inline std::string format_rational(const Rational& r) {
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

namespace detail {

inline bool is_integer_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

inline BigInt parse_bigint(std::string_view s) {
  if (!is_integer_literal(s)) throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
  std::string body(s);
  if (body.front() == '+') body.erase(0, 1);
  return BigInt(body);
}

}  // namespace detail

/// Accepts "p/q", "p" and plain decimals such as "0.05" (converted exactly).
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = detail::parse_bigint(text.substr(0, slash));
    BigInt den = detail::parse_bigint(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (whole == "-" || whole == "+" || whole.empty()) whole = "0";
    if (frac.empty() || !detail::is_integer_literal(frac) || frac.front() == '-' || frac.front() == '+')
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt w = detail::parse_bigint(whole);
    if (w < 0) w = -w;
    Rational value = Rational(w) + Rational(detail::parse_bigint(frac), scale);
    return negative ? Rational(-value) : value;
  }
  return Rational(detail::parse_bigint(text));
}

}  // namespace permuton
