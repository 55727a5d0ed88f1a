#pragma once

#include <cmath>

namespace flatkhinchin {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
// counterclockwise quarter turn
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Wrap a real to [0, 1).
inline double wrap_turn(double t) {
  double r = t - std::floor(t);
  if (r >= 1.0) r = 0.0;
  return r;
}

/// Circle distance on [0,1): min(|a-b|, 1-|a-b|).
inline double turn_distance(double a, double b) {
  double d = std::fabs(wrap_turn(a) - wrap_turn(b));
  return d > 0.5 ? 1.0 - d : d;
}

/// Direction of flow in turn units: geometric angle = 2*pi*tau, tau in [0,1).
struct Direction {
  double tau = 0.0;

  explicit Direction(double t = 0.0) : tau(wrap_turn(t)) {}

  /// Unit vector. Quarter turns are produced exactly so axis-parallel
  /// directions stay axis-parallel.
  Vec2 unit() const {
    double q = tau * 4.0;
    if (q == 0.0) return {1.0, 0.0};
    if (q == 1.0) return {0.0, 1.0};
    if (q == 2.0) return {-1.0, 0.0};
    if (q == 3.0) return {0.0, -1.0};
    return {std::cos(kTwoPi * tau), std::sin(kTwoPi * tau)};
  }

  Direction opposite() const { return Direction(tau + 0.5); }
};

/// Direction of a nonzero vector in turn units, in [0,1).
inline double vector_tau(Vec2 v) {
  double a = std::atan2(v.y, v.x) / kTwoPi;
  return wrap_turn(a);
}

/// Angle swept rotating a counterclockwise onto b, in [0, 2*pi).
inline double ccw_angle(Vec2 a, Vec2 b) {
  double ang = std::atan2(cross(a, b), dot(a, b));
  if (ang < 0) ang += kTwoPi;
  return ang;
}

/// Line-line intersection parameters: p + r*pd = a + w*ad. Returns false for
/// (near-)parallel lines; the caller range-checks r and w.
inline bool line_params(Vec2 p, Vec2 pd, Vec2 a, Vec2 ad, double& r, double& w) {
  double denom = cross(pd, ad);
  if (std::fabs(denom) <= 1e-14 * norm(pd) * norm(ad)) return false;
  Vec2 rel = a - p;
  r = cross(rel, ad) / denom;
  w = cross(rel, pd) / denom;
  return true;
}

}  // namespace flatkhinchin
