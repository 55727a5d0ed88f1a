#include "flatkhinchin/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

namespace flatkhinchin {

PathTracer::PathTracer(const TranslationSurface& s, SurfacePoint start, Vec2 dir_unit,
                       FlowOptions opt)
    : s_(s), opt_(opt), poly_(start.poly), pos_(start.pos), dir_(dir_unit) {
  if (start.poly < 0 || start.poly >= s.num_polygons())
    throw InvalidPointError("surface point references a nonexistent polygon");
  if (!point_in_polygon(s.polygon(start.poly), start.pos, 1e-7 * s.scale()))
    throw InvalidPointError("surface point lies outside its polygon");
}

std::optional<PathTracer::Exit> PathTracer::find_exit_impl(int exclude_vertex) const {
  const auto& poly = s_.polygon(poly_);
  const double t_slack = 1e-12 * s_.scale();
  double best_t = std::numeric_limits<double>::infinity();
  Exit best{0, -1, 0};
  for (int e = 0; e < poly.n; ++e) {
    const Vec2 ev = poly.evec[e];
    double denom = cross(dir_, ev);
    if (denom <= 1e-15 * poly.elen[e]) continue;  // not an outgoing edge
    Vec2 rel = poly.v[e] - pos_;
    double t = cross(rel, ev) / denom;
    if (t < -t_slack || t >= best_t) continue;
    double s = (dot(dir_, ev) * t - dot(rel, ev)) / (poly.elen[e] * poly.elen[e]);
    if (s < -1e-9 || s > 1.0 + 1e-9) continue;
    if (exclude_vertex >= 0 && t <= t_slack &&
        ((e == exclude_vertex && s <= 1e-9) ||
         ((e + 1) % poly.n == exclude_vertex && s >= 1.0 - 1e-9)))
      continue;
    best_t = t;
    best = {t < 0 ? 0.0 : t, e, s};
  }
  if (best.edge < 0) return std::nullopt;
  return best;
}

std::optional<PathTracer::Exit> PathTracer::find_exit() const {
  auto best = find_exit_impl(-1);
  if (!best) return best;
  const double t_slack = 1e-12 * s_.scale();
  if (best->t > t_slack) return best;
  // Zero-advance exit pivoting on the start vertex. When the direction
  // points into that corner's wedge the ray really enters this polygon (a
  // reflex corner can still put an adjacent edge line "outward"), so the
  // true exit lies farther along.
  const auto& poly = s_.polygon(poly_);
  int v = -1;
  if (best->s <= 1e-9) {
    v = best->edge;
  } else if (best->s >= 1.0 - 1e-9) {
    v = (best->edge + 1) % poly.n;
  }
  if (v < 0 || norm(pos_ - poly.v[v]) > 1e-9 * s_.scale()) return best;
  int prev = (v + poly.n - 1) % poly.n;
  double wedge = ccw_angle(poly.evec[v], -poly.evec[prev]);
  double ang = ccw_angle(poly.evec[v], dir_);
  if (ang >= kTwoPi - 1e-12) ang = 0;
  if (ang >= wedge - 1e-12) return best;  // direction leaves the corner: cascade
  return find_exit_impl(v);
}

void PathTracer::cross_edge(const Exit& e) {
  const auto& poly = s_.polygon(poly_);
  Vec2 q = pos_ + dir_ * e.t;

  // proximity to the crossed edge's endpoints; on a hit the tracer state is
  // left at the segment start so callers can recover the partial segment
  double d0 = std::fabs(e.s) * poly.elen[e.edge];
  double d1 = std::fabs(1.0 - e.s) * poly.elen[e.edge];
  double eps = s_.eps_sing();
  if (d0 <= eps || d1 <= eps) {
    int v = d0 <= d1 ? e.edge : (e.edge + 1) % poly.n;
    int cls = s_.vertex_class(poly_, v);
    bool flat = s_.class_flat(cls);
    bool blocking = s_.class_blocking(cls);
    if (!flat || (blocking && !opt_.pass_flat_vertices))
      throw SingularityHitError(elapsed_ + e.t, poly_, poly.v[v], cls);
    // total angle 2*pi: the straight continuation is well defined, keep going
  }

  elapsed_ += e.t;
  const auto& link = s_.link(poly_, e.edge);
  pos_ = q + link.translation;
  poly_ = link.poly;
  ++crossings_;
  if (opt_.max_crossings > 0 && crossings_ > opt_.max_crossings)
    throw StepLimitError("edge-crossing cap exceeded (near-singular direction?)");
  if (e.t <= 1e-15 * s_.scale()) {
    if (++zero_steps_ > 64)
      throw StepLimitError("trajectory is stuck at a vertex crossing");
  } else {
    zero_steps_ = 0;
  }
}

PathTracer::Step PathTracer::advance(double t_stop) {
  double remaining = t_stop - elapsed_;
  Step st{poly_, pos_, pos_, elapsed_, elapsed_, false, -1};
  if (remaining <= 0) return st;
  auto exit = find_exit();
  if (!exit || exit->t >= remaining) {
    Vec2 to = pos_ + dir_ * remaining;
    st.to = to;
    st.t1 = t_stop;
    pos_ = to;
    elapsed_ = t_stop;
    if (!exit && !point_in_polygon(s_.polygon(poly_), pos_, 1e-7 * s_.scale()))
      throw StepLimitError("trajectory left its polygon (degenerate geometry)");
    return st;
  }
  st.to = pos_ + dir_ * exit->t;
  st.t1 = elapsed_ + exit->t;
  st.crossed = true;
  st.edge = exit->edge;
  cross_edge(*exit);
  return st;
}

SurfacePoint flow_point(const TranslationSurface& s, SurfacePoint x, Direction dir,
                        double t, FlowOptions opt) {
  if (!std::isfinite(t)) throw BadParameterError("flow time must be finite");
  if (t < 0) {
    dir = dir.opposite();
    t = -t;
  }
  if (opt.max_crossings < 0)
    opt.max_crossings =
        static_cast<long>(10.0 * t / s.shortest_edge()) + 1000;
  PathTracer tr(s, x, dir.unit(), opt);
  while (true) {
    auto st = tr.advance(t);
    if (!st.crossed) break;
  }
  return tr.position();
}

std::vector<TrajectoryEvent> trace(const TranslationSurface& s, SurfacePoint x,
                                   Direction dir, double t_max, FlowOptions opt) {
  if (!(t_max > 0)) throw BadParameterError("t_max must be positive");
  if (opt.max_crossings < 0)
    opt.max_crossings =
        static_cast<long>(10.0 * t_max / s.shortest_edge()) + 1000;
  std::vector<TrajectoryEvent> events;
  PathTracer tr(s, x, dir.unit(), opt);
  try {
    while (true) {
      auto st = tr.advance(t_max);
      if (st.crossed) {
        events.push_back({TrajectoryEvent::Kind::edge_crossing, st.t1, tr.position()});
      } else {
        events.push_back({TrajectoryEvent::Kind::time_reached, st.t1, tr.position()});
        break;
      }
    }
  } catch (const SingularityHitError& hit) {
    events.push_back(
        {TrajectoryEvent::Kind::singularity_hit, hit.time, {hit.poly, hit.pos}});
  }
  return events;
}

namespace {

double origin_segment_distance(Vec2 a, Vec2 b) {
  Vec2 e = b - a;
  double len2 = norm2(e);
  double t = len2 > 0 ? std::clamp(-dot(a, e) / len2, 0.0, 1.0) : 0.0;
  return norm(a + e * t);
}

/// Lift angle `ang` to the representative nearest `ref`.
double lift_angle(double ang, double ref) {
  return ref + std::remainder(ang - ref, kTwoPi);
}

}  // namespace

void develop_fan(
    const TranslationSurface& s, int start_poly, Vec2 center, double radius,
    double wedge_lo, double wedge_hi, int max_depth, long max_states,
    const std::function<void(int poly, Vec2 offset, double lo, double hi)>& visit) {
  struct State {
    int poly;
    Vec2 offset;
    double lo, hi;
    int depth;
  };
  // The window of a state is partitioned by the FIRST exit edge of its rays
  // (the lower envelope of the edge cones). Pushing every overlapping cone
  // would duplicate corridors on non-convex polygons, where a ray meets the
  // boundary more than twice. Hairline windows are dropped: targets on
  // corridor boundaries are still seen from the neighbouring corridor
  // (callers keep a small angular slack when filtering).
  const double min_width = 1e-13;
  const double eps_c = 1e-12 * s.scale();
  std::vector<State> stack;
  stack.push_back({start_poly, {0, 0}, wedge_lo, wedge_hi, 0});
  long visited = 0;
  std::vector<double> cuts;
  struct Cone {
    int edge;
    double lo, hi;
  };
  std::vector<Cone> cones;
  while (!stack.empty()) {
    State st = stack.back();
    stack.pop_back();
    if (++visited > max_states)
      throw ExplosionGuardError("developed-polygon cap exceeded");
    visit(st.poly, st.offset, st.lo, st.hi);
    if (st.depth >= max_depth) continue;
    const auto& poly = s.polygon(st.poly);
    double mid = 0.5 * (st.lo + st.hi);

    cuts.clear();
    cones.clear();
    cuts.push_back(st.lo);
    cuts.push_back(st.hi);
    for (int e = 0; e < poly.n; ++e) {
      Vec2 a = poly.v[e] + st.offset - center;
      Vec2 b = poly.v[(e + 1) % poly.n] + st.offset - center;
      if (norm(a) <= eps_c || norm(b) <= eps_c) continue;  // edge at the center
      if (cross(a, b) <= 0) continue;  // crossing would re-enter, not exit
      // angular cone subtended by the edge, clipped to the window
      double base = std::atan2(a.y, a.x);
      double span = ccw_angle(a, b);  // in (0, pi)
      double lifted = lift_angle(base, mid);
      for (double b0 : {lifted - kTwoPi, lifted, lifted + kTwoPi}) {
        double nlo = std::max(st.lo, b0);
        double nhi = std::min(st.hi, b0 + span);
        if (nhi - nlo <= 0) continue;
        cones.push_back({e, nlo, nhi});
        cuts.push_back(nlo);
        cuts.push_back(nhi);
      }
    }
    if (cones.empty()) continue;
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double nlo = cuts[i], nhi = cuts[i + 1];
      if (nhi - nlo <= min_width) continue;
      double am = 0.5 * (nlo + nhi);
      Vec2 d{std::cos(am), std::sin(am)};
      // nearest covering edge wins the whole piece: the copies' edges do not
      // cross, so the envelope cannot change inside it
      int best_edge = -1;
      double best_t = std::numeric_limits<double>::infinity();
      for (const Cone& c : cones) {
        if (am < c.lo || am > c.hi) continue;
        Vec2 a = poly.v[c.edge] + st.offset - center;
        Vec2 ev = poly.evec[c.edge];
        double denom = cross(d, ev);
        if (denom <= 0) continue;
        double t = cross(a, ev) / denom;
        if (t > 0 && t < best_t) {
          best_t = t;
          best_edge = c.edge;
        }
      }
      if (best_edge < 0) continue;
      Vec2 wa = poly.v[best_edge] + st.offset - center;
      Vec2 wb = poly.v[(best_edge + 1) % poly.n] + st.offset - center;
      if (origin_segment_distance(wa, wb) > radius) continue;
      const auto& link = s.link(st.poly, best_edge);
      stack.push_back(
          {link.poly, st.offset - link.translation, nlo, nhi, st.depth + 1});
    }
  }
}

std::optional<double> distance(const TranslationSurface& s, SurfacePoint x,
                               SurfacePoint y, DistanceOptions opt) {
  double r_max = opt.r_max;
  if (r_max < 0)
    r_max = s.has_blocking() ? 0.5 * s.shortest_saddle() : 0.5 * s.scale();
  if (!(r_max > 0)) throw BadParameterError("r_max must be positive");

  if (x.poly == y.poly && norm(x.pos - y.pos) <= 1e-15 * s.scale()) return 0.0;

  std::vector<std::pair<double, Vec2>> candidates;
  auto collect = [&](int poly, Vec2 offset, double lo, double hi) {
    if (poly != y.poly) return;
    Vec2 u = (y.pos + offset) - x.pos;
    double d = norm(u);
    if (d > r_max + 1e-12 * s.scale()) return;
    if (d > 1e-13 * s.scale()) {
      double ang = lift_angle(std::atan2(u.y, u.x), 0.5 * (lo + hi));
      if (ang < lo - 1e-9 || ang > hi + 1e-9) return;
    }
    candidates.push_back({d, u});
  };
  // two half-plane fans cover all directions
  develop_fan(s, x.poly, x.pos, r_max, 0.0, kTwoPi / 2, opt.max_depth,
              opt.max_states, collect);
  develop_fan(s, x.poly, x.pos, r_max, kTwoPi / 2, kTwoPi, opt.max_depth,
              opt.max_states, collect);
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double tol_arrive = 1e-7 * s.scale();
  for (const auto& [d, u] : candidates) {
    if (d <= 1e-13 * s.scale()) return 0.0;
    // confirm the straight development is realized on the surface
    FlowOptions fo;
    fo.pass_flat_vertices = true;  // the metric ignores marked points
    fo.max_crossings = 4 * opt.max_depth + 64;
    try {
      PathTracer tr(s, x, u * (1.0 / d), fo);
      while (true) {
        auto st = tr.advance(d);
        if (!st.crossed) break;
      }
      if (canonical_equal(s, tr.position(), y, tol_arrive)) return d;
    } catch (const SingularityHitError&) {
      // straight path runs into a cone point; not a geodesic realization
    } catch (const StepLimitError&) {
    }
  }
  return std::nullopt;
}

}  // namespace flatkhinchin
