#pragma once

#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>

#include "dtafopt/errors.hpp"

namespace dtafopt {

// Exact band fractions such as 3/32. Conversion to double happens only in
// value().
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw ConfigError("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }

  std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

  // Accepts "p/q", integers and plain decimals ("0.09375").
  static Rational parse(const std::string& text) {
    auto bad = [&] { return ConfigError("not a rational number: '" + text + "'"); };
    auto parse_int = [&](const std::string& s) -> std::int64_t {
      if (s.empty()) throw bad();
      std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
      if (i == s.size()) throw bad();
      for (std::size_t k = i; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) throw bad();
      if (s.size() - i > 15) throw bad();
      return std::stoll(s);
    };
    const auto slash = text.find('/');
    if (slash != std::string::npos) return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_int(text), 1);
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15) throw bad();
    std::int64_t scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    const bool neg = !whole.empty() && whole[0] == '-';
    const std::int64_t w = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
    const std::int64_t f = parse_int(frac);
    const std::int64_t mag = (w < 0 ? -w : w) * scale + f;
    return Rational(neg ? -mag : mag, scale);
  }
};

}  // namespace dtafopt
