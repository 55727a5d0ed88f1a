#include "flatkhinchin/cylinders.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace flatkhinchin {

namespace {

struct PathSeg {
  int poly;
  Vec2 a, b;
  double t0, t1;
};

struct TracedPath {
  std::vector<PathSeg> segs;
  bool hit = false;
  double hit_time = 0;
  int hit_class = -1;
  SurfacePoint end;
};

/// Trace up to `length`, keeping every per-polygon segment. A singularity
/// hit terminates the path; the partial segment up to the hit is kept.
TracedPath trace_path(const TranslationSurface& s, SurfacePoint start, Vec2 dir,
                      double length, FlowOptions opt = {}) {
  if (opt.max_crossings < 0)
    opt.max_crossings = static_cast<long>(10.0 * length / s.shortest_edge()) + 1000;
  TracedPath out;
  PathTracer tr(s, start, dir, opt);
  try {
    while (true) {
      auto st = tr.advance(length);
      if (st.t1 > st.t0) out.segs.push_back({st.poly, st.from, st.to, st.t0, st.t1});
      if (!st.crossed) break;
    }
  } catch (const SingularityHitError& e) {
    SurfacePoint at = tr.position();
    out.segs.push_back({e.poly, at.pos, e.pos, tr.elapsed(), e.time});
    out.hit = true;
    out.hit_time = e.time;
    out.hit_class = e.vertex_class;
    out.end = {e.poly, e.pos};
    return out;
  }
  out.end = tr.position();
  return out;
}

SurfacePoint point_on_path(const std::vector<PathSeg>& segs, double t) {
  for (const auto& sg : segs) {
    if (t <= sg.t1 || &sg == &segs.back()) {
      double dt = sg.t1 - sg.t0;
      double r = dt > 0 ? (t - sg.t0) / dt : 0.0;
      r = std::clamp(r, 0.0, 1.0);
      return {sg.poly, sg.a + (sg.b - sg.a) * r};
    }
  }
  return {segs.back().poly, segs.back().b};
}

}  // namespace

namespace {

/// Shared enumeration core. `sector`, when nonempty, lists angular intervals
/// (radians) the search is clipped to.
std::vector<SaddleConnection> enumerate_saddles_impl(
    const TranslationSurface& s, double L, const SaddleOptions& opt,
    const std::vector<std::pair<double, double>>& sector) {
  if (!(L > 0)) throw BadParameterError("length bound must be positive");
  if (!s.has_blocking())
    throw NoCylindersError("surface has no singularities or marked points");

  std::vector<SaddleConnection> out;
  const double round_eps = 1e-10 * std::max(1.0, s.scale());

  for (const SingularityInfo& sing : s.singularities()) {
    for (const VertexRef& corner : sing.corners) {
      const auto& poly = s.polygon(corner.poly);
      Vec2 origin = poly.v[corner.vertex];
      int prev = (corner.vertex + poly.n - 1) % poly.n;
      Vec2 wedge_start = poly.evec[corner.vertex];
      double wedge_angle = ccw_angle(wedge_start, -poly.evec[prev]);
      double wedge_base = std::atan2(wedge_start.y, wedge_start.x);

      // fan windows: the corner wedge, clipped to the sector when given
      std::vector<std::pair<double, double>> windows;
      if (sector.empty()) {
        windows.push_back({wedge_base, wedge_base + wedge_angle});
      } else {
        for (auto [slo, shi] : sector) {
          double lifted = wedge_base + std::remainder(slo - wedge_base, kTwoPi);
          for (int k = -1; k <= 1; ++k) {
            double lo = std::max(wedge_base, lifted + k * kTwoPi);
            double hi = std::min(wedge_base + wedge_angle,
                                 lifted + (shi - slo) + k * kTwoPi);
            if (hi - lo > 1e-13) windows.push_back({lo, hi});
          }
        }
      }

      std::set<std::pair<long, long>> cand_keys;
      std::vector<Vec2> candidates;
      for (auto [wlo, whi] : windows) {
        develop_fan(
            s, corner.poly, origin, L, wlo, whi, opt.max_depth, opt.max_states,
            [&](int dpoly, Vec2 offset, double lo, double hi) {
              const auto& dp = s.polygon(dpoly);
              for (int w = 0; w < dp.n; ++w) {
                if (!s.class_blocking(s.vertex_class(dpoly, w))) continue;
                Vec2 u = (dp.v[w] + offset) - origin;
                double d = norm(u);
                if (d <= 1e-12 * s.scale() || d > L * (1.0 + 1e-12)) continue;
                double ang = std::atan2(u.y, u.x);
                ang = lo + std::remainder(ang - 0.5 * (lo + hi), kTwoPi) +
                      0.5 * (hi - lo);
                if (ang < lo - 1e-9 || ang > hi + 1e-9) continue;
                auto key = std::make_pair(std::lround(u.x / round_eps),
                                          std::lround(u.y / round_eps));
                if (cand_keys.insert(key).second) candidates.push_back(u);
              }
            });
      }

      for (Vec2 u : candidates) {
        // keep directions in this corner's half-open wedge
        double ang = ccw_angle(wedge_start, u);
        if (ang >= kTwoPi - 1e-12) ang = 0;
        if (ang >= wedge_angle - 1e-12) continue;

        double d = norm(u);
        auto path = trace_path(s, {corner.poly, origin}, u * (1.0 / d),
                               d * (1.0 + 1e-9) + 1e-12 * s.scale());
        if (!path.hit) continue;
        if (std::fabs(path.hit_time - d) > 1e-9 * (1.0 + d)) continue;  // earlier hit
        SaddleConnection sc;
        sc.holonomy = u;
        sc.start_class = sing.cls;
        sc.end_class = path.hit_class;
        sc.start_point = {corner.poly, origin};
        sc.start_vertex = corner.vertex;
        out.push_back(sc);
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const SaddleConnection& a,
                                       const SaddleConnection& b) {
    double na = a.length(), nb = b.length();
    if (na != nb) return na < nb;
    return a.tau() < b.tau();
  });
  return out;
}

}  // namespace

std::vector<SaddleConnection> enumerate_saddle_connections(
    const TranslationSurface& s, double L, SaddleOptions opt) {
  return enumerate_saddles_impl(s, L, opt, {});
}

std::vector<SaddleConnection> enumerate_saddle_connections_in_sector(
    const TranslationSurface& s, double L, double tau_center, double halfwidth,
    SaddleOptions opt) {
  if (!(halfwidth > 0)) throw BadParameterError("sector halfwidth must be positive");
  if (halfwidth >= 0.25) return enumerate_saddles_impl(s, L, opt, {});
  std::vector<std::pair<double, double>> sector;
  for (double c : {tau_center, tau_center + 0.5}) {
    double lo = (c - halfwidth) * kTwoPi;
    double hi = (c + halfwidth) * kTwoPi;
    sector.push_back({lo, hi});
  }
  return enumerate_saddles_impl(s, L, opt, sector);
}

double shortest_saddle(const TranslationSurface& s) {
  if (!s.has_blocking())
    throw NoCylindersError("surface has no singularities or marked points");
  double L = s.shortest_edge();
  for (int i = 0; i < 24; ++i) {
    auto scs = enumerate_saddle_connections(s, L);
    if (!scs.empty()) return scs.front().length();
    L *= 2;
  }
  throw ExplosionGuardError("no saddle connection found within the search bound");
}

double TranslationSurface::shortest_saddle() const {
  std::call_once(saddle_cache_->once, [this] {
    saddle_cache_->value = flatkhinchin::shortest_saddle(*this);
  });
  return saddle_cache_->value;
}

namespace {

struct GateResult {
  bool closed = false;
  double period = 0;
};

/// Does the leaf through q close up within t_cap? Watches a small
/// perpendicular gate at q: the first on-center crossing is the period.
/// Off-center crossings are other passes of the leaf and are ignored.
GateResult leaf_closure(const TranslationSurface& s, SurfacePoint q, Vec2 leaf_dir,
                        double t_cap, double gate_half) {
  const double center_eps = 1e-9 * s.scale();
  Vec2 n = perp(leaf_dir);
  Vec2 ga = q.pos - n * gate_half;
  Vec2 gd = n * (2.0 * gate_half);
  FlowOptions fo;
  fo.max_crossings = static_cast<long>(10.0 * t_cap / s.shortest_edge()) + 1000;
  try {
    PathTracer tr(s, q, leaf_dir, fo);
    while (true) {
      auto st = tr.advance(t_cap);
      if (st.t1 > st.t0 && st.poly == q.poly) {
        Vec2 pd = st.to - st.from;
        double r, w;
        if (line_params(st.from, pd, ga, gd, r, w) && r >= 0 && r < 1 &&
            w >= 0 && w <= 1) {
          double t_hit = st.t0 + r * (st.t1 - st.t0);
          if (t_hit > center_eps &&
              std::fabs((w - 0.5) * 2.0 * gate_half) <= center_eps)
            return {true, t_hit};
        }
      }
      if (!st.crossed) break;
    }
  } catch (const SingularityHitError&) {
  } catch (const StepLimitError&) {
  }
  return {};
}

struct DirGroup {
  double tau;       // unoriented direction in [0, 1/2)
  Vec2 unit;        // aligned unit vector
  std::vector<int> members;  // indices of aligned saddle connections
};

}  // namespace

namespace {

std::vector<Cylinder> build_cylinders_from_saddles(
    const TranslationSurface& s, const std::vector<SaddleConnection>& scs,
    double L, double min_area, const CylinderOptions& opt) {
  std::vector<Cylinder> out;
  if (scs.empty()) return out;

  // group aligned saddle connections by unoriented direction
  std::vector<std::pair<double, int>> by_tau;
  for (int i = 0; i < static_cast<int>(scs.size()); ++i) {
    Vec2 h = scs[i].holonomy;
    if (h.y < 0 || (h.y == 0 && h.x < 0)) continue;  // keep one orientation
    by_tau.push_back({vector_tau(h), i});
  }
  std::sort(by_tau.begin(), by_tau.end());
  std::vector<DirGroup> groups;
  for (auto [tau, idx] : by_tau) {
    if (!groups.empty() && std::fabs(tau - groups.back().tau) < 1e-12) {
      groups.back().members.push_back(idx);
    } else {
      Vec2 h = scs[idx].holonomy;
      groups.push_back({tau, h * (1.0 / norm(h)), {idx}});
    }
  }

  const double area = s.total_area();
  const double e_min = s.shortest_edge();
  const double delta =
      std::min(opt.probe_offset_factor * e_min, 0.5 * min_area * area / L);
  const double t_cap = L * (1.0 + 1e-6);
  std::set<std::tuple<long, long, int, int, long>> seen;

  for (const DirGroup& g : groups) {
    // geometric realization of every parallel saddle connection
    std::vector<TracedPath> paths;
    std::unordered_map<int, std::vector<std::pair<int, int>>> segs_by_poly;
    for (int k = 0; k < static_cast<int>(g.members.size()); ++k) {
      const SaddleConnection& sc = scs[g.members[k]];
      double len = sc.length();
      auto path = trace_path(s, sc.start_point, sc.holonomy * (1.0 / len),
                             len * (1.0 + 1e-9) + 1e-12 * s.scale());
      for (int si = 0; si < static_cast<int>(path.segs.size()); ++si)
        segs_by_poly[path.segs[si].poly].push_back({k, si});
      paths.push_back(std::move(path));
    }

    for (int k = 0; k < static_cast<int>(g.members.size()); ++k) {
      const SaddleConnection& sc = scs[g.members[k]];
      double len = sc.length();
      SurfacePoint mid = point_on_path(paths[k].segs, 0.5 * len);

      for (int side : {+1, -1}) {
        Vec2 n = perp(g.unit) * double(side);
        // probe a nearby leaf to see whether a short-enough cylinder abuts
        SurfacePoint probe, probe2;
        try {
          FlowOptions fo;
          fo.max_crossings = 1000;
          PathTracer tp(s, mid, n, fo);
          while (tp.advance(delta).crossed) {
          }
          probe = tp.position();
          PathTracer tp2(s, mid, n, fo);
          while (tp2.advance(0.5 * delta).crossed) {
          }
          probe2 = tp2.position();
        } catch (const SingularityHitError&) {
          continue;
        }
        auto c1 = leaf_closure(s, probe, g.unit, t_cap, 0.5 * delta);
        if (!c1.closed) continue;
        auto c2 = leaf_closure(s, probe2, g.unit, t_cap, 0.25 * delta);
        if (!c2.closed) continue;  // coincidence guard

        // exact height: perpendicular ray from the boundary midpoint to the
        // first crossing of any parallel saddle connection; running into a
        // singularity also means the opposite boundary was reached
        double ray_cap = area / std::max(len, 1e-12) * (1.0 + 1e-9) + 1e-9;
        const double eps_h = 0.25 * delta;
        auto ray = trace_path(s, mid, n, ray_cap);
        double h = ray.hit ? ray.hit_time : -1;
        for (const PathSeg& st : ray.segs) {
          if (!(st.t1 > st.t0)) continue;
          auto it = segs_by_poly.find(st.poly);
          if (it == segs_by_poly.end()) continue;
          Vec2 pd = st.b - st.a;
          double best = -1;
          for (auto [pk, si] : it->second) {
            const PathSeg& bs = paths[pk].segs[si];
            double r, w;
            if (!line_params(st.a, pd, bs.a, bs.b - bs.a, r, w)) continue;
            if (r < -1e-12 || r > 1.0 + 1e-12 || w < -1e-9 || w > 1.0 + 1e-9) continue;
            double t_hit = st.t0 + std::clamp(r, 0.0, 1.0) * (st.t1 - st.t0);
            if (t_hit <= eps_h) continue;
            if (best < 0 || t_hit < best) best = t_hit;
          }
          if (best >= 0 && (h < 0 || best < h)) {
            h = best;
            break;
          }
        }
        if (h <= 0) continue;

        SurfacePoint witness = point_on_path(ray.segs, 0.5 * h);
        auto wincl = leaf_closure(s, witness, g.unit, t_cap,
                                  std::min(0.5 * delta, 0.25 * h));
        if (!wincl.closed) continue;
        double T = wincl.period;
        if (!(T < L)) continue;
        double a_frac = T * h / area;
        if (a_frac < min_area * (1.0 - 1e-9)) continue;

        // canonical mid-leaf key: smallest edge-crossing record of the closed
        // orbit (window slightly past T so the set is start-point independent)
        FlowOptions fo;
        fo.max_crossings = static_cast<long>(10.0 * T / e_min) + 1000;
        PathTracer orb(s, witness, g.unit, fo);
        std::tuple<int, int, long> best_cross{INT32_MAX, INT32_MAX, 0};
        while (true) {
          auto st = orb.advance(T * (1.0 + 1e-9));
          if (!st.crossed) break;
          const auto& poly = s.polygon(st.poly);
          Vec2 rel = st.to - poly.v[st.edge];
          double sp = dot(rel, poly.evec[st.edge]) /
                      (poly.elen[st.edge] * poly.elen[st.edge]);
          auto key = std::make_tuple(st.poly, st.edge, std::lround(sp * 1e8));
          if (key < best_cross) best_cross = key;
        }
        auto full_key = std::make_tuple(std::lround(g.tau * 1e10),
                                        std::lround(T * 1e10),
                                        std::get<0>(best_cross),
                                        std::get<1>(best_cross),
                                        std::get<2>(best_cross));
        if (!seen.insert(full_key).second) continue;

        Cylinder cyl;
        cyl.direction = Direction(g.tau);
        cyl.core_length = T;
        cyl.height = h;
        cyl.area_fraction = a_frac;
        cyl.witness = witness;
        cyl.chord_base = mid;
        cyl.chord_tau = wrap_turn(g.tau + 0.25 * side);
        cyl.tau_aligned = g.tau;
        out.push_back(cyl);
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Cylinder& a, const Cylinder& b) {
    if (a.core_length != b.core_length) return a.core_length < b.core_length;
    return a.direction.tau < b.direction.tau;
  });
  return out;
}

}  // namespace

std::vector<Cylinder> enumerate_cylinders(const TranslationSurface& s, double L,
                                          double min_area, CylinderOptions opt) {
  if (!(L > 0)) throw BadParameterError("length bound must be positive");
  if (!(min_area > 0) || min_area > 1.0)
    throw BadParameterError("min_area must lie in (0, 1]");
  auto scs = enumerate_saddle_connections(s, L, opt.saddle);
  return build_cylinders_from_saddles(s, scs, L, min_area, opt);
}

std::vector<Cylinder> enumerate_cylinders_in_sector(const TranslationSurface& s,
                                                    double L, double min_area,
                                                    double tau_center,
                                                    double halfwidth,
                                                    CylinderOptions opt) {
  if (!(L > 0)) throw BadParameterError("length bound must be positive");
  if (!(min_area > 0) || min_area > 1.0)
    throw BadParameterError("min_area must lie in (0, 1]");
  auto scs = enumerate_saddle_connections_in_sector(s, L, tau_center, halfwidth,
                                                    opt.saddle);
  auto cyls = build_cylinders_from_saddles(s, scs, L, min_area, opt);
  std::vector<Cylinder> out;
  for (const Cylinder& c : cyls) {
    double d = std::min(turn_distance(c.direction.tau, tau_center),
                        turn_distance(c.direction.tau + 0.5, tau_center));
    if (d <= halfwidth + 1e-9) out.push_back(c);
  }
  return out;
}

std::vector<Cylinder> cylinder_sequence(const TranslationSurface& s, double L,
                                        CylinderOptions opt) {
  return enumerate_cylinders(s, L, s.sigma(), opt);
}

CylinderMembership::CylinderMembership(const TranslationSurface& s,
                                       const Cylinder& c)
    : s_(&s), c_(c) {
  // chord: full-height perpendicular cross-section from the boundary point
  auto chord = trace_path(s, c.chord_base, Direction(c.chord_tau).unit(),
                          c.height * (1.0 - 1e-12));
  by_poly_.resize(s.num_polygons());
  for (const auto& sg : chord.segs) {
    by_poly_[sg.poly].push_back(static_cast<int>(chord_.size()));
    chord_.push_back({sg.poly, sg.a, sg.b});
  }
}

bool CylinderMembership::contains(SurfacePoint x) const {
  const TranslationSurface& s = *s_;
  FlowOptions fo;
  fo.max_crossings =
      static_cast<long>(10.0 * c_.core_length / s.shortest_edge()) + 1000;
  try {
    PathTracer tr(s, x, Direction(c_.tau_aligned).unit(), fo);
    double cap = c_.core_length * (1.0 + 1e-6);
    while (true) {
      auto st = tr.advance(cap);
      if (st.t1 > st.t0 && !by_poly_[st.poly].empty()) {
        Vec2 pd = st.to - st.from;
        for (int i : by_poly_[st.poly]) {
          const Seg& cs = chord_[i];
          double r, w;
          if (line_params(st.from, pd, cs.a, cs.b - cs.a, r, w) &&
              r >= -1e-12 && r <= 1 + 1e-12 && w >= 0 && w <= 1 &&
              st.t0 + std::clamp(r, 0.0, 1.0) * (st.t1 - st.t0) > 1e-12)
            return true;
        }
      }
      if (!st.crossed) break;
    }
  } catch (const SingularityHitError&) {
    return false;  // singular leaf: boundary, not the open cylinder
  } catch (const StepLimitError&) {
    return false;
  }
  return false;
}

bool cylinder_contains(const TranslationSurface& s, const Cylinder& c,
                       SurfacePoint x) {
  return CylinderMembership(s, c).contains(x);
}

SurfacePoint cylinder_point(const TranslationSurface& s, const Cylinder& c,
                            double along, double across) {
  if (std::fabs(across) >= 0.5 * c.height)
    throw BadParameterError("across coordinate outside the cylinder");
  SurfacePoint p = c.witness;
  if (across != 0)
    p = flow_point(s, p, Direction(c.chord_tau), across);
  if (along != 0) p = flow_point(s, p, Direction(c.tau_aligned), along);
  return p;
}

}  // namespace flatkhinchin
