#include "flatkhinchin/iet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flatkhinchin {

Transversal::Transversal(const TranslationSurface& s, SurfacePoint base,
                         Direction dir, double length)
    : s_(&s), base_(base), dir_(dir), length_(length) {
  if (!(length > 0)) throw BadParameterError("transversal length must be positive");
  Vec2 u = dir.unit();
  FlowOptions fo;
  fo.max_crossings = static_cast<long>(10.0 * length / s.shortest_edge()) + 1000;
  PathTracer tr(s, base, u, fo);
  SurfacePoint end{};
  try {
    while (true) {
      auto st = tr.advance(length);
      if (st.t1 > st.t0)
        chain_.push_back({st.poly, st.from, st.to, st.t0, st.t1});
      if (!st.crossed) break;
    }
    end = tr.position();
  } catch (const SingularityHitError& e) {
    if (e.time < length - 1e-9 * std::max(1.0, length))
      throw SingularEndpointError("transversal interior meets a singularity");
    SurfacePoint at = tr.position();
    chain_.push_back({e.poly, at.pos, e.pos, tr.elapsed(), e.time});
    end = {e.poly, e.pos};
  }
  closed_ = canonical_equal(s, end, base, 1e-9 * s.scale());
  by_poly_.resize(s.num_polygons());
  for (int i = 0; i < static_cast<int>(chain_.size()); ++i)
    by_poly_[chain_[i].poly].push_back(i);
}

const std::vector<int>& Transversal::segs_in_poly(int poly) const {
  if (poly < 0 || poly >= static_cast<int>(by_poly_.size())) return empty_;
  return by_poly_[poly];
}

SurfacePoint Transversal::point_at(double u) const {
  u = std::clamp(u, 0.0, length_);
  for (const auto& sg : chain_) {
    if (u <= sg.s1 || &sg == &chain_.back()) {
      double dt = sg.s1 - sg.s0;
      double r = dt > 0 ? std::clamp((u - sg.s0) / dt, 0.0, 1.0) : 0.0;
      return {sg.poly, sg.a + (sg.b - sg.a) * r};
    }
  }
  return base_;
}

namespace {

struct ReturnHit {
  double u;     // arc-length parameter on the transversal
  double time;  // flow time of the crossing
};

/// First crossing of the transversal by the flow from `x`, excluding the
/// start itself. Throws NoReturnError past the cap.
ReturnHit first_crossing(const TranslationSurface& s, const Transversal& t,
                         SurfacePoint x, Vec2 flow_u, double cap) {
  const double eps_t = 1e-9 * s.scale();
  FlowOptions fo;
  fo.max_crossings = static_cast<long>(10.0 * cap / s.shortest_edge()) + 1000;
  PathTracer tr(s, x, flow_u, fo);
  while (true) {
    auto st = tr.advance(cap);
    if (st.t1 > st.t0) {
      Vec2 pd = st.to - st.from;
      double best_r = std::numeric_limits<double>::infinity();
      double best_u = -1;
      for (int i : t.segs_in_poly(st.poly)) {
        const auto& sg = t.chain()[i];
        double r, w;
        if (!line_params(st.from, pd, sg.a, sg.b - sg.a, r, w)) continue;
        if (r < -1e-12 || r > 1 + 1e-12 || w < -1e-12 || w > 1 + 1e-12) continue;
        r = std::clamp(r, 0.0, 1.0);
        double t_hit = st.t0 + r * (st.t1 - st.t0);
        if (t_hit <= eps_t) continue;
        if (r < best_r) {
          best_r = r;
          best_u = sg.s0 + std::clamp(w, 0.0, 1.0) * (sg.s1 - sg.s0);
        }
      }
      if (best_u >= 0)
        return {best_u, st.t0 + best_r * (st.t1 - st.t0)};
    }
    if (!st.crossed)
      throw NoReturnError("flow did not return to the transversal within the cap");
  }
}

}  // namespace

Iet first_return_iet(const TranslationSurface& s, Direction dir,
                     const Transversal& t, FirstReturnOptions opt) {
  Vec2 fu = dir.unit();
  Vec2 tu = t.dir().unit();
  if (std::fabs(cross(fu, tu)) < 1e-9)
    throw BadParameterError("flow direction is parallel to the transversal");
  const double len = t.length();
  const double cap = opt.cap_factor * len;
  const double eps_u = 1e-10 * len;
  Vec2 back_u = -fu;

  std::vector<double> breakpoints;
  auto add_breakpoint = [&](double u) {
    if (u > eps_u && u < len - eps_u) breakpoints.push_back(u);
  };

  // transversal preimages of singularities: first backward crossing of each
  // incoming separatrix
  for (const SingularityInfo& sing : s.singularities()) {
    for (const VertexRef& corner : sing.corners) {
      const auto& poly = s.polygon(corner.poly);
      int prev = (corner.vertex + poly.n - 1) % poly.n;
      Vec2 wedge_start = poly.evec[corner.vertex];
      double wedge_angle = ccw_angle(wedge_start, -poly.evec[prev]);
      double ang = ccw_angle(wedge_start, back_u);
      if (ang >= kTwoPi - 1e-12) ang = 0;
      if (ang >= wedge_angle - 1e-12) continue;
      try {
        auto hit = first_crossing(s, t, {corner.poly, poly.v[corner.vertex]},
                                  back_u, cap);
        add_breakpoint(hit.u);
      } catch (const NoReturnError&) {
        // this separatrix never meets the transversal within the cap
      } catch (const SingularityHitError&) {
        // blocked by another singularity first; its separatrices cover this
      }
    }
  }

  // endpoint (or cut) preimages, needed so pieces tile the domain
  auto endpoint_pullback = [&](double param) {
    SurfacePoint p = t.point_at(param);
    SurfacePoint cp = canonical_point(s, p);
    const auto& poly = s.polygon(cp.poly);
    for (int v = 0; v < poly.n; ++v)
      if (norm(cp.pos - poly.v[v]) <= 1e-9 * s.scale() &&
          s.class_blocking(s.vertex_class(cp.poly, v)))
        return;  // singular endpoint: already handled above
    try {
      auto hit = first_crossing(s, t, p, back_u, cap);
      add_breakpoint(hit.u);
    } catch (const NoReturnError&) {
    } catch (const SingularityHitError&) {
    }
  };
  if (t.closed()) {
    endpoint_pullback(0.0);
  } else {
    endpoint_pullback(0.0);
    endpoint_pullback(len);
  }

  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end(),
                                [&](double a, double b) { return b - a < eps_u; }),
                    breakpoints.end());

  // per-piece shifts from sample orbits, cross-checked at a second point
  Iet iet;
  iet.domain_length = len;
  iet.breakpoints = breakpoints;
  iet.closed = t.closed();
  std::vector<double> bounds{0.0};
  bounds.insert(bounds.end(), breakpoints.begin(), breakpoints.end());
  bounds.push_back(len);
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    double lo = bounds[i], hi = bounds[i + 1];
    auto shift_at = [&](double frac) {
      double u = lo + (hi - lo) * frac;
      auto hit = first_crossing(s, t, t.point_at(u), fu, cap);
      return hit.u - u;
    };
    double d_mid = shift_at(0.5);
    double d_alt = shift_at(0.29);
    if (std::fabs(d_mid - d_alt) > 1e-9 * std::max(1.0, len))
      throw Error("piece is not a single translation (missed breakpoint?)");
    iet.translations.push_back(d_mid);
  }

  // images must tile [0, len)
  std::vector<std::pair<double, double>> images;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
    images.push_back({bounds[i] + iet.translations[i], bounds[i + 1] + iet.translations[i]});
  std::sort(images.begin(), images.end());
  double tol = 1e-9 * std::max(1.0, len);
  double cursor = 0;
  for (auto [a, b] : images) {
    if (std::fabs(a - cursor) > tol)
      throw Error("first-return images do not tile the domain");
    cursor = b;
  }
  if (std::fabs(cursor - len) > tol)
    throw Error("first-return images do not tile the domain");
  return iet;
}

int Iet::piece_index(double x) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return static_cast<int>(it - breakpoints.begin());
}

double Iet::apply(double x, long n) const {
  if (x < 0 || x >= domain_length)
    throw BadParameterError("point outside the exchange domain");
  if (n == 0) return x;
  const Iet* map = this;
  Iet inv;
  if (n < 0) {
    inv = inverse();
    map = &inv;
    n = -n;
  }
  for (long k = 1; k <= n; ++k) {
    auto eq = std::lower_bound(map->breakpoints.begin(), map->breakpoints.end(), x);
    if (eq != map->breakpoints.end() && *eq == x) throw HitBreakpointError(k);
    x += map->translations[map->piece_index(x)];
    if (x < 0) x = 0;
    if (x >= domain_length) x = std::nextafter(domain_length, 0.0);
  }
  return x;
}

Iet Iet::inverse() const {
  std::vector<std::pair<double, double>> img;  // (image start, -shift)
  std::vector<double> bounds{0.0};
  bounds.insert(bounds.end(), breakpoints.begin(), breakpoints.end());
  for (std::size_t i = 0; i < translations.size(); ++i)
    img.push_back({bounds[i] + translations[i], -translations[i]});
  std::sort(img.begin(), img.end());
  Iet inv;
  inv.domain_length = domain_length;
  inv.closed = closed;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (i > 0) inv.breakpoints.push_back(img[i].first);
    inv.translations.push_back(img[i].second);
  }
  return inv;
}

RecurrenceScan recurrence_scan(const Iet& iet, double x, const SequenceSpec& seq,
                               long N) {
  if (N < 1) throw BadParameterError("N must be at least 1");
  seq.validate();
  RecurrenceScan out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  out.tail_min_ratio = std::numeric_limits<double>::infinity();
  const double len = iet.domain_length;
  Iet fwd = iet;  // local copy so apply() is a tight loop without inverse setup
  double y = x;
  for (long n = 1; n <= N; ++n) {
    try {
      y = fwd.apply(y, 1);
    } catch (const HitBreakpointError&) {
      throw HitBreakpointError(n);
    }
    double d = std::fabs(y - x);
    if (iet.closed) d = std::min(d, len - d);
    double a = seq(double(n));
    double ratio = d / a;
    out.min_ratio = std::min(out.min_ratio, ratio);
    if (2 * n > N) out.tail_min_ratio = std::min(out.tail_min_ratio, ratio);
    if (d < a) {
      out.hits.push_back(n);
      out.hit_distances.push_back(d);
      if (out.first_hit < 0) out.first_hit = n;
    }
  }
  return out;
}

}  // namespace flatkhinchin
