#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "flatkhinchin/errors.hpp"

namespace flatkhinchin {

/// Non-increasing positive sequence/function generator shared by the
/// recurrence scans (a_n at integer n) and the flow experiments (f(t) at
/// real t >= 1).
///   constant:c     a = c
///   harmonic:c     a = c/n
///   power:c,p      a = c/n^p
///   log:c,q        a = c/(n * ln(max(n,2))^q)
///   explicit:v1,v2,...   finite list, last value repeated
struct SequenceSpec {
  enum class Kind { constant, harmonic, power, log_power, explicit_list };
  Kind kind = Kind::harmonic;
  double c = 1.0;
  double p = 1.0;
  double q = 1.0;
  std::vector<double> values;

  double operator()(double n) const {
    switch (kind) {
      case Kind::constant: return c;
      case Kind::harmonic: return c / n;
      case Kind::power: return c / std::pow(n, p);
      case Kind::log_power: {
        double l = std::log(n < 2.0 ? 2.0 : n);
        return c / (n * std::pow(l, q));
      }
      case Kind::explicit_list: {
        if (values.empty()) throw BadParameterError("explicit sequence is empty");
        std::size_t i = n < 1.0 ? 0 : static_cast<std::size_t>(n - 1.0);
        if (i >= values.size()) i = values.size() - 1;
        return values[i];
      }
    }
    return 0;
  }

  /// Parse "harmonic:1", "power:1,3", "log:1,2", "constant:10",
  /// "explicit:0.5,0.25".
  static SequenceSpec parse(const std::string& text);
  std::string describe() const;

  /// Checks positivity and (for explicit lists) monotonicity.
  void validate() const;
};

}  // namespace flatkhinchin
