#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace flatkhinchin {

/// Exact rational with 64-bit numerator/denominator. Used for surface
/// construction and gluing validation when the input coordinates are
/// rational; overflow raises instead of wrapping.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  static std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN)
      throw std::overflow_error("rational overflow");
    return static_cast<std::int64_t>(v);
  }

  friend Rational operator+(Rational a, Rational b) {
    __int128 n = (__int128)a.num * b.den + (__int128)b.num * a.den;
    __int128 d = (__int128)a.den * b.den;
    return make(n, d);
  }
  friend Rational operator-(Rational a, Rational b) {
    __int128 n = (__int128)a.num * b.den - (__int128)b.num * a.den;
    __int128 d = (__int128)a.den * b.den;
    return make(n, d);
  }
  friend Rational operator*(Rational a, Rational b) {
    return make((__int128)a.num * b.num, (__int128)a.den * b.den);
  }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw std::domain_error("rational division by zero");
    return make((__int128)a.num * b.den, (__int128)a.den * b.num);
  }
  Rational operator-() const { return Rational(-num, den); }
  friend bool operator==(Rational a, Rational b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(Rational a, Rational b) { return !(a == b); }

  double to_double() const { return double(num) / double(den); }
  bool is_zero() const { return num == 0; }

  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 an = n < 0 ? -n : n;
    __int128 g = gcd128(an, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num = checked(n);
    r.den = checked(d);
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  /// Parse "p/q", an integer, or a plain decimal like "-1.25".
  static Rational parse(const std::string& s);
};

struct RationalVec2 {
  Rational x, y;
  bool operator==(const RationalVec2&) const = default;
};

inline Rational Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::int64_t n = std::stoll(s.substr(0, slash));
    std::int64_t d = std::stoll(s.substr(slash + 1));
    return Rational(n, d);
  }
  auto dotp = s.find('.');
  if (dotp == std::string::npos) return Rational(std::stoll(s));
  std::string digits = s.substr(0, dotp) + s.substr(dotp + 1);
  std::size_t frac_len = s.size() - dotp - 1;
  if (frac_len > 17) throw std::overflow_error("decimal too long for exact rational");
  std::int64_t n = std::stoll(digits);
  std::int64_t d = 1;
  for (std::size_t i = 0; i < frac_len; ++i) d *= 10;
  return Rational(n, d);
}

}  // namespace flatkhinchin
