#pragma once

// Exact rational arithmetic for thresholds, costs, and utilization values.
// All comparisons in the analyzer happen on exact rationals; doubles appear
// only when a report is rendered.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sla4oai {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer pow10(unsigned k) {
  Integer r = 1;
  for (unsigned i = 0; i < k; ++i) r *= 10;
  return r;
}

inline bool is_integral(const Rational& q) { return denominator(q) == 1; }

// Parses "42", "-1.5", ".25", "1e3", "2.5e-2" and "n/d" fraction notation.
// Returns nullopt on anything else (so callers can emit a located diagnostic).
inline std::optional<Rational> parse_rational(std::string_view text) {
  size_t begin = text.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return std::nullopt;
  size_t end = text.find_last_not_of(" \t");
  text = text.substr(begin, end - begin + 1);
  if (text.empty()) return std::nullopt;

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
  }

  // Fraction notation.
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view ns = text.substr(0, slash), ds = text.substr(slash + 1);
    if (ns.empty() || ds.empty()) return std::nullopt;
    for (char c : ns)
      if (c < '0' || c > '9') return std::nullopt;
    for (char c : ds)
      if (c < '0' || c > '9') return std::nullopt;
    Integer n{std::string(ns)}, d{std::string(ds)};
    if (d == 0) return std::nullopt;
    Rational q(n, d);
    return negative ? -q : q;
  }

  std::string_view mantissa = text;
  long exponent = 0;
  if (auto epos = text.find_first_of("eE"); epos != std::string_view::npos) {
    mantissa = text.substr(0, epos);
    std::string_view es = text.substr(epos + 1);
    if (es.empty()) return std::nullopt;
    bool eneg = false;
    if (es.front() == '+' || es.front() == '-') {
      eneg = es.front() == '-';
      es.remove_prefix(1);
      if (es.empty()) return std::nullopt;
    }
    if (es.size() > 6) return std::nullopt;
    for (char c : es) {
      if (c < '0' || c > '9') return std::nullopt;
      exponent = exponent * 10 + (c - '0');
    }
    if (eneg) exponent = -exponent;
  }

  std::string digits;
  long frac_digits = 0;
  bool seen_point = false, seen_digit = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;

  // cpp_int reads a leading '0' as an octal prefix; strip to decimal form.
  size_t first = digits.find_first_not_of('0');
  digits = first == std::string::npos ? "0" : digits.substr(first);

  Integer n(digits);
  long e = exponent - frac_digits;
  Rational q = e >= 0 ? Rational(n * pow10(static_cast<unsigned>(e)))
                      : Rational(n, pow10(static_cast<unsigned>(-e)));
  return negative ? -q : q;
}

// Exact decimal string when the denominator is 2^a*5^b, "n/d" otherwise.
inline std::string decimal_string(const Rational& q) {
  Integer n = numerator(q), d = denominator(q);
  std::string sign = n < 0 ? "-" : "";
  Integer an = abs(n);
  if (d == 1) return sign + an.str();

  Integer rest = d;
  unsigned twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return sign + an.str() + "/" + d.str();

  unsigned k = twos > fives ? twos : fives;
  Integer scaled = an * pow10(k) / d;
  std::string s = scaled.str();
  if (s.size() <= k) s.insert(0, k + 1 - s.size(), '0');
  s.insert(s.size() - k, ".");
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return sign + s;
}

// Shortest decimal that round-trips the value to four significant digits.
inline std::string format_sig4(const Rational& q) {
  if (q == 0) return "0";
  std::string sign = q < 0 ? "-" : "";
  Integer n = abs(numerator(q)), d = denominator(q);

  // Find E with 10^E <= n/d < 10^(E+1).
  long e = static_cast<long>(n.str().size()) - static_cast<long>(d.str().size());
  auto cmp_pow = [&](long exp) {
    // compares n/d against 10^exp without negative powers
    if (exp >= 0) return n >= d * pow10(static_cast<unsigned>(exp));
    return n * pow10(static_cast<unsigned>(-exp)) >= d;
  };
  while (cmp_pow(e + 1)) ++e;
  while (!cmp_pow(e)) --e;

  // Round to four significant digits, half away from zero.
  Integer num, den;
  long shift = 3 - e;
  if (shift >= 0) {
    num = n * pow10(static_cast<unsigned>(shift));
    den = d;
  } else {
    num = n;
    den = d * pow10(static_cast<unsigned>(-shift));
  }
  Integer digits = (2 * num + den) / (2 * den);
  if (digits == 10000) { digits = 1000; ++e; }

  std::string ds = digits.str();  // exactly 4 digits
  std::string out;
  if (e >= 3) {
    out = ds + std::string(static_cast<size_t>(e - 3), '0');
  } else if (e >= 0) {
    out = ds.substr(0, static_cast<size_t>(e + 1)) + "." +
          ds.substr(static_cast<size_t>(e + 1));
  } else {
    out = "0." + std::string(static_cast<size_t>(-e - 1), '0') + ds;
  }
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return sign + out;
}

// Renders a utilization fraction (1 = 100%) as a percentage, e.g. "86.4%".
inline std::string format_percent(const Rational& fraction) {
  return format_sig4(fraction * 100) + "%";
}

}  // namespace sla4oai
