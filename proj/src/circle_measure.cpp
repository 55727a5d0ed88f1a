#include "flatkhinchin/circle_measure.hpp"

#include <algorithm>
#include <cmath>

namespace flatkhinchin {

ArcUnion ArcUnion::from_intervals(std::vector<std::pair<double, double>> ivals) {
  std::vector<std::pair<double, double>> clean;
  for (auto [a, b] : ivals) {
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
    if (b > a) clean.push_back({a, b});
  }
  std::sort(clean.begin(), clean.end());
  ArcUnion u;
  for (auto iv : clean) {
    if (!u.ivals_.empty() && iv.first <= u.ivals_.back().second) {
      u.ivals_.back().second = std::max(u.ivals_.back().second, iv.second);
    } else {
      u.ivals_.push_back(iv);
    }
  }
  return u;
}

ArcUnion ArcUnion::from_arcs(const std::vector<Arc>& arcs) {
  std::vector<std::pair<double, double>> ivals;
  for (const Arc& a : arcs) {
    if (!(a.radius > 0)) continue;
    if (a.radius >= 0.5) {
      ivals.push_back({0.0, 1.0});
      continue;
    }
    double c = wrap_turn(a.center);
    double lo = c - a.radius, hi = c + a.radius;
    if (lo < 0) {
      ivals.push_back({lo + 1.0, 1.0});
      ivals.push_back({0.0, hi});
    } else if (hi > 1.0) {
      ivals.push_back({lo, 1.0});
      ivals.push_back({0.0, hi - 1.0});
    } else {
      ivals.push_back({lo, hi});
    }
  }
  return from_intervals(std::move(ivals));
}

double ArcUnion::measure() const {
  double m = 0;
  for (auto [a, b] : ivals_) m += b - a;
  return m;
}

ArcUnion ArcUnion::intersect(double j0, double j1) const {
  std::vector<std::pair<double, double>> out;
  for (auto [a, b] : ivals_) {
    double lo = std::max(a, j0), hi = std::min(b, j1);
    if (hi > lo) out.push_back({lo, hi});
  }
  ArcUnion u;
  u.ivals_ = std::move(out);
  return u;
}

ArcUnion::CoverResult ArcUnion::cover_circle() const {
  CoverResult r;
  if (ivals_.empty()) {
    r.covers = false;
    r.gap_center = 0.5;
    r.gap_length = 1.0;
    return r;
  }
  // gaps between consecutive intervals plus the wrap gap
  double best_len = 0, best_center = 0;
  for (std::size_t i = 0; i + 1 < ivals_.size(); ++i) {
    double gap = ivals_[i + 1].first - ivals_[i].second;
    if (gap > best_len) {
      best_len = gap;
      best_center = 0.5 * (ivals_[i].second + ivals_[i + 1].first);
    }
  }
  double wrap = (1.0 - ivals_.back().second) + ivals_.front().first;
  if (wrap > best_len) {
    best_len = wrap;
    best_center = wrap_turn(ivals_.back().second + 0.5 * wrap);
  }
  r.covers = best_len <= 0;
  r.gap_center = best_center;
  r.gap_length = best_len;
  return r;
}

double union_measure(const std::vector<Arc>& arcs, double j0, double j1) {
  return ArcUnion::from_arcs(arcs).intersect(j0, j1).measure();
}

ArcUnion::CoverResult covers_circle(const std::vector<Arc>& arcs) {
  return ArcUnion::from_arcs(arcs).cover_circle();
}

std::vector<Arc> direction_arcs(const std::vector<Cylinder>& cyls,
                                const std::function<double(double)>& radius_of) {
  std::vector<Arc> arcs;
  arcs.reserve(2 * cyls.size());
  for (const Cylinder& c : cyls) {
    double r = radius_of(c.core_length);
    arcs.push_back({c.direction.tau, r});
    arcs.push_back({wrap_turn(c.direction.tau + 0.5), r});
  }
  return arcs;
}

CoveringSearch minimal_covering_constant(const TranslationSurface& s, double L,
                                         CylinderOptions opt) {
  auto cyls = cylinder_sequence(s, L, opt);
  if (cyls.empty()) throw NoCylindersError("no cylinders below the length bound");

  auto covers_with = [&](double c) {
    auto arcs = direction_arcs(cyls, [&](double T) { return c / (T * L); });
    return covers_circle(arcs).covers;
  };

  double hi = 4.0;
  int guard = 0;
  while (!covers_with(hi)) {
    hi *= 2.0;
    if (++guard > 24) throw ExplosionGuardError("covering constant search diverged");
  }
  double lo = 0.0;
  while (hi - lo > 1e-6) {
    double mid = 0.5 * (lo + hi);
    if (covers_with(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, static_cast<int>(cyls.size())};
}

KeyBoundReport key_bound_report(const TranslationSurface& s, double N, double j0,
                                double j1, double C1, CylinderOptions opt) {
  if (!(N > 0) || !(C1 > 1)) throw BadParameterError("need N > 0 and C1 > 1");
  auto cyls = cylinder_sequence(s, C1 * N, opt);
  if (cyls.empty()) throw NoCylindersError("no cylinders below the length bound");

  KeyBoundReport rep;
  rep.correction = 2.0 / ((C1 * N) * (C1 * N));
  rep.lambda_j = std::max(j1 - j0, 0.0);
  double radius = 1.0 / ((C1 * N) * (C1 * N));

  std::vector<Arc> arcs;
  for (const Cylinder& c : cyls) {
    if (c.core_length < N) continue;  // annulus only
    for (double tau : {c.direction.tau, wrap_turn(c.direction.tau + 0.5)}) {
      // keep arcs whose center is within a radius of J (the others cannot
      // meet it)
      bool near = (tau >= j0 - radius && tau <= j1 + radius) ||
                  (tau + 1.0 >= j0 - radius && tau + 1.0 <= j1 + radius) ||
                  (tau - 1.0 >= j0 - radius && tau - 1.0 <= j1 + radius);
      if (!near) continue;
      arcs.push_back({tau, radius});
      ++rep.annulus_count;
    }
  }
  rep.measured = union_measure(arcs, j0, j1);
  if (rep.lambda_j > 0)
    rep.c2_candidate = (rep.measured + rep.correction) / rep.lambda_j;
  return rep;
}

}  // namespace flatkhinchin
