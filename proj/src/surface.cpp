#include "flatkhinchin/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace flatkhinchin {

namespace {

double polygon_signed_area(const std::vector<Vec2>& v) {
  double a = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    a += cross(p, q);
  }
  return 0.5 * a;
}

Rational polygon_signed_area_exact(const std::vector<RationalVec2>& v) {
  Rational a(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const RationalVec2& p = v[i];
    const RationalVec2& q = v[(i + 1) % v.size()];
    a = a + (p.x * q.y - p.y * q.x);
  }
  return a / Rational(2);
}

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 &&
         o3 != 0 && o4 != 0;
}

void check_simple(const std::vector<Vec2>& v, int poly_idx) {
  int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_properly_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
        std::ostringstream os;
        os << "polygon " << poly_idx << " is self-intersecting";
        throw DegenerateSurfaceError(os.str());
      }
    }
  }
}

}  // namespace

std::vector<SingularityInfo> TranslationSurface::singularities() const {
  std::vector<SingularityInfo> out;
  for (int c = 0; c < num_classes(); ++c) {
    if (class_mult_[c] > 0 || class_marked_[c]) {
      SingularityInfo info;
      info.cls = c;
      info.cone_angle = class_angle_[c];
      info.multiplicity = class_mult_[c];
      info.marked = class_marked_[c];
      info.corners = class_corners_[c];
      out.push_back(std::move(info));
    }
  }
  return out;
}

TranslationSurface build_surface(std::vector<PolygonSpec> polygons,
                                 std::vector<EdgeGluing> gluings,
                                 std::vector<VertexRef> marked_points) {
  if (polygons.empty()) throw DegenerateSurfaceError("no polygons");

  TranslationSurface s;
  bool exact = true;
  for (const auto& ps : polygons) exact = exact && ps.exact.has_value();
  s.exact_ = exact;

  // polygon geometry
  int np = static_cast<int>(polygons.size());
  s.polys_.resize(np);
  double shortest_edge = std::numeric_limits<double>::infinity();
  double scale = 0;
  double area = 0;
  for (int p = 0; p < np; ++p) {
    auto& poly = s.polys_[p];
    poly.v = polygons[p].vertices;
    poly.n = static_cast<int>(poly.v.size());
    if (poly.n < 3) throw DegenerateSurfaceError("polygon with fewer than 3 vertices");
    for (const Vec2& q : poly.v)
      if (!std::isfinite(q.x) || !std::isfinite(q.y))
        throw DegenerateSurfaceError("non-finite vertex coordinate");
    double a = polygon_signed_area(poly.v);
    if (exact) {
      Rational ae = polygon_signed_area_exact(*polygons[p].exact);
      if (ae.num <= 0) throw DegenerateSurfaceError("polygon area <= 0");
      a = ae.to_double();
    } else if (a <= 0) {
      throw DegenerateSurfaceError("polygon area <= 0 (vertices must be ccw)");
    }
    check_simple(poly.v, p);
    area += a;
    poly.evec.resize(poly.n);
    poly.elen.resize(poly.n);
    Vec2 lo = poly.v[0], hi = poly.v[0];
    for (int i = 0; i < poly.n; ++i) {
      poly.evec[i] = poly.v[(i + 1) % poly.n] - poly.v[i];
      poly.elen[i] = norm(poly.evec[i]);
      if (poly.elen[i] == 0) throw DegenerateSurfaceError("zero-length edge");
      shortest_edge = std::min(shortest_edge, poly.elen[i]);
      lo.x = std::min(lo.x, poly.v[i].x);
      lo.y = std::min(lo.y, poly.v[i].y);
      hi.x = std::max(hi.x, poly.v[i].x);
      hi.y = std::max(hi.y, poly.v[i].y);
    }
    scale = std::max(scale, norm(hi - lo));
  }
  s.area_ = area;
  s.scale_ = scale;
  s.shortest_edge_ = shortest_edge;

  // gluing table
  s.links_.resize(np);
  for (int p = 0; p < np; ++p) s.links_[p].resize(s.polys_[p].n);
  auto edge_ok = [&](int p, int e) {
    return p >= 0 && p < np && e >= 0 && e < s.polys_[p].n;
  };
  for (const EdgeGluing& g : gluings) {
    if (!edge_ok(g.poly_a, g.edge_a) || !edge_ok(g.poly_b, g.edge_b))
      throw BadParameterError("gluing references a nonexistent edge");
    if (g.poly_a == g.poly_b && g.edge_a == g.edge_b)
      throw MismatchedEdgeError("edge glued to itself");
    for (auto [p, e] : {std::pair{g.poly_a, g.edge_a}, std::pair{g.poly_b, g.edge_b}})
      if (s.links_[p][e].poly >= 0)
        throw UnpairedEdgeError("edge appears in more than one gluing");

    Vec2 va = s.polys_[g.poly_a].evec[g.edge_a];
    Vec2 vb = s.polys_[g.poly_b].evec[g.edge_b];
    bool match;
    if (exact) {
      const auto& ea = *polygons[g.poly_a].exact;
      const auto& eb = *polygons[g.poly_b].exact;
      int na = s.polys_[g.poly_a].n, nb = s.polys_[g.poly_b].n;
      RationalVec2 ra{ea[(g.edge_a + 1) % na].x - ea[g.edge_a].x,
                      ea[(g.edge_a + 1) % na].y - ea[g.edge_a].y};
      RationalVec2 rb{eb[(g.edge_b + 1) % nb].x - eb[g.edge_b].x,
                      eb[(g.edge_b + 1) % nb].y - eb[g.edge_b].y};
      match = (ra.x + rb.x).is_zero() && (ra.y + rb.y).is_zero();
    } else {
      double tol = 1e-12 * std::max(norm(va), norm(vb));
      match = norm(va + vb) <= tol;
    }
    if (!match)
      throw MismatchedEdgeError(
          "glued edges must be parallel, equal length, opposite orientation");

    Vec2 a0 = s.polys_[g.poly_a].v[g.edge_a];
    Vec2 a1 = s.polys_[g.poly_a].v[(g.edge_a + 1) % s.polys_[g.poly_a].n];
    Vec2 b0 = s.polys_[g.poly_b].v[g.edge_b];
    Vec2 b1 = s.polys_[g.poly_b].v[(g.edge_b + 1) % s.polys_[g.poly_b].n];
    s.links_[g.poly_a][g.edge_a] = {g.poly_b, g.edge_b, b1 - a0};
    s.links_[g.poly_b][g.edge_b] = {g.poly_a, g.edge_a, a1 - b0};
  }
  int edge_pairs = 0;
  for (int p = 0; p < np; ++p)
    for (int e = 0; e < s.polys_[p].n; ++e) {
      if (s.links_[p][e].poly < 0) {
        std::ostringstream os;
        os << "edge (" << p << "," << e << ") is not glued";
        throw UnpairedEdgeError(os.str());
      }
      ++edge_pairs;
    }
  edge_pairs /= 2;

  // vertex classes by walking corners around each vertex
  s.vclass_.resize(np);
  for (int p = 0; p < np; ++p) s.vclass_[p].assign(s.polys_[p].n, -1);
  int ncls = 0;
  for (int p = 0; p < np; ++p) {
    for (int v = 0; v < s.polys_[p].n; ++v) {
      if (s.vclass_[p][v] >= 0) continue;
      int cls = ncls++;
      s.class_corners_.emplace_back();
      double angle = 0;
      int cp = p, cv = v;
      int guard = 0;
      do {
        if (s.vclass_[cp][cv] >= 0)
          throw DegenerateSurfaceError("inconsistent vertex identifications");
        s.vclass_[cp][cv] = cls;
        s.class_corners_[cls].push_back({cp, cv});
        const auto& poly = s.polys_[cp];
        int prev = (cv + poly.n - 1) % poly.n;
        angle += ccw_angle(poly.evec[cv], -poly.evec[prev]);
        const auto& link = s.links_[cp][cv];  // cross the edge leaving cv
        cp = link.poly;
        cv = (link.edge + 1) % s.polys_[cp].n;
        if (++guard > 100000)
          throw DegenerateSurfaceError("vertex walk does not close");
      } while (!(cp == p && cv == v));
      s.class_angle_.push_back(angle);
    }
  }

  // cone angles must be positive multiples of 2*pi
  s.class_mult_.resize(ncls);
  long turning_sum = 0;  // sum over classes of (angle/2pi - 1), exact integer
  for (int c = 0; c < ncls; ++c) {
    double turns = s.class_angle_[c] / kTwoPi;
    long k = std::lround(turns);
    if (k < 1 || std::fabs(turns - double(k)) > 1e-9 * double(k))
      throw DegenerateSurfaceError("vertex class angle is not a multiple of 2*pi");
    s.class_mult_[c] = static_cast<int>(k - 1);
    turning_sum += k - 1;
  }

  // Euler characteristic: V - E + F = 2 - 2g
  int euler = ncls - edge_pairs + np;
  if ((2 - euler) % 2 != 0 || euler > 0)
    throw DegenerateSurfaceError("gluing does not produce a closed surface of genus >= 1");
  s.genus_ = (2 - euler) / 2;
  // Gauss-Bonnet, combinatorially exact: sum (angle - 2*pi) = 2*pi*(2g-2)
  if (turning_sum != 2L * s.genus_ - 2L)
    throw DegenerateSurfaceError("cone angles violate the genus count");

  s.class_marked_.assign(ncls, 0);
  for (const VertexRef& m : marked_points) {
    if (!edge_ok(m.poly, m.vertex))
      throw BadParameterError("marked point references a nonexistent vertex");
    s.class_marked_[s.vclass_[m.poly][m.vertex]] = 1;
  }

  s.mult_sum_ = 0;
  s.has_blocking_ = false;
  for (int c = 0; c < ncls; ++c) {
    s.mult_sum_ += s.class_mult_[c];
    if (s.class_mult_[c] > 0 || s.class_marked_[c]) s.has_blocking_ = true;
  }

  s.sigma_ = s.genus_ >= 2 ? 1.0 / (2.0 * s.genus_ - 2.0) : 1.0;
  return s;
}

namespace {

TranslationSurface make_square_torus() {
  std::vector<RationalVec2> sq{{Rational(0), Rational(0)},
                               {Rational(1), Rational(0)},
                               {Rational(1), Rational(1)},
                               {Rational(0), Rational(1)}};
  std::vector<PolygonSpec> polys{PolygonSpec::from_rational(sq)};
  std::vector<EdgeGluing> glue{{0, 0, 0, 2}, {0, 1, 0, 3}};
  // origin marked so the torus has saddle connections and cylinders
  return build_surface(std::move(polys), std::move(glue), {{0, 0}});
}

TranslationSurface make_l_table(Rational a, Rational b) {
  Rational one(1);
  if (!(a.to_double() > 1.0) || !(b.to_double() > 1.0))
    throw BadParameterError("L(a,b) needs a,b > 1");
  // ([0,a] x [0,1]) union ([0,1] x [0,b]); eight boundary edges
  std::vector<RationalVec2> v{
      {Rational(0), Rational(0)}, {one, Rational(0)}, {a, Rational(0)},
      {a, one},                   {one, one},         {one, b},
      {Rational(0), b},           {Rational(0), one}};
  std::vector<PolygonSpec> polys{PolygonSpec::from_rational(v)};
  std::vector<EdgeGluing> glue{
      {0, 0, 0, 5},  // bottom-left unit <-> top
      {0, 1, 0, 3},  // bottom-right <-> arm ceiling
      {0, 2, 0, 7},  // right unit <-> left-bottom unit
      {0, 4, 0, 6},  // arm right side <-> left upper
  };
  return build_surface(std::move(polys), std::move(glue));
}

TranslationSurface make_regular_octagon() {
  double w = 0.5 + std::sqrt(0.5);
  std::vector<Vec2> v{{0.5, -w}, {w, -0.5}, {w, 0.5},   {0.5, w},
                      {-0.5, w}, {-w, 0.5}, {-w, -0.5}, {-0.5, -w}};
  PolygonSpec ps;
  ps.vertices = v;
  std::vector<EdgeGluing> glue;
  for (int e = 0; e < 4; ++e) glue.push_back({0, e, 0, e + 4});
  return build_surface({ps}, std::move(glue));
}

}  // namespace

TranslationSurface builtin_surface(const std::string& name) {
  if (name == "square_torus") return make_square_torus();
  if (name == "regular_octagon") return make_regular_octagon();
  if (name.rfind("L(", 0) == 0 && name.back() == ')') {
    std::string inner = name.substr(2, name.size() - 3);
    auto comma = inner.find(',');
    if (comma == std::string::npos) throw BadParameterError("expected L(a,b)");
    try {
      Rational a = Rational::parse(inner.substr(0, comma));
      Rational b = Rational::parse(inner.substr(comma + 1));
      return make_l_table(a, b);
    } catch (const std::exception& e) {
      throw BadParameterError(std::string("bad L(a,b) parameters: ") + e.what());
    }
  }
  throw BadParameterError("unknown builtin surface: " + name);
}

CoveringConstant covering_constant_formula(int multiplicity_sum, double shortest_saddle) {
  if (multiplicity_sum < 0 || multiplicity_sum > 64)
    throw OverflowError("multiplicity sum out of range");
  if (!(shortest_saddle > 0)) throw BadParameterError("shortest saddle must be > 0");
  CoveringConstant c;
  // log2(2^(2^(4m)) * sqrt(s)) = 2^(4m) + log2(s)/2
  c.log2_value = std::exp2(4.0 * multiplicity_sum) + 0.5 * std::log2(shortest_saddle);
  if (c.log2_value < 1023.0) c.value = std::exp2(c.log2_value);
  return c;
}

CoveringConstant covering_constant_formula(const TranslationSurface& s) {
  return covering_constant_formula(s.multiplicity_sum(), s.shortest_saddle());
}

bool point_in_polygon(const TranslationSurface::Polygon& p, Vec2 pos, double tol) {
  bool reflex = false;
  for (int i = 0; i < p.n && !reflex; ++i)
    if (cross(p.evec[i], p.evec[(i + 1) % p.n]) < 0) reflex = true;
  if (!reflex) {
    for (int i = 0; i < p.n; ++i)
      if (cross(p.evec[i], pos - p.v[i]) < -tol * p.elen[i]) return false;
    return true;
  }
  // near-boundary points count as inside
  for (int i = 0; i < p.n; ++i) {
    Vec2 d = pos - p.v[i];
    double t = dot(d, p.evec[i]) / (p.elen[i] * p.elen[i]);
    t = std::clamp(t, 0.0, 1.0);
    Vec2 foot = p.v[i] + p.evec[i] * t;
    if (norm(pos - foot) <= tol) return true;
  }
  int winds = 0;
  for (int i = 0; i < p.n; ++i) {
    Vec2 a = p.v[i], b = p.v[(i + 1) % p.n];
    if ((a.y <= pos.y) != (b.y <= pos.y)) {
      double xi = a.x + (pos.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (xi > pos.x) winds ^= 1;
    }
  }
  return winds != 0;
}

SurfacePoint canonical_point(const TranslationSurface& s, SurfacePoint x, double eps) {
  if (eps < 0) eps = 1e-9 * s.scale();
  const auto& poly = s.polygon(x.poly);
  for (int v = 0; v < poly.n; ++v) {
    if (norm(x.pos - poly.v[v]) <= eps) {
      const auto& corners = s.class_corners()[s.vertex_class(x.poly, v)];
      VertexRef best = corners.front();
      for (const auto& c : corners)
        if (c.poly < best.poly || (c.poly == best.poly && c.vertex < best.vertex))
          best = c;
      return {best.poly, s.polygon(best.poly).v[best.vertex]};
    }
  }
  for (int e = 0; e < poly.n; ++e) {
    Vec2 d = x.pos - poly.v[e];
    double t = dot(d, poly.evec[e]) / (poly.elen[e] * poly.elen[e]);
    if (t < -eps || t > 1 + eps) continue;
    double off = std::fabs(cross(poly.evec[e], d)) / poly.elen[e];
    if (off <= eps) {
      const auto& link = s.link(x.poly, e);
      if (link.poly < x.poly || (link.poly == x.poly && link.edge < e))
        return {link.poly, x.pos + link.translation};
      return x;
    }
  }
  return x;
}

bool canonical_equal(const TranslationSurface& s, SurfacePoint a, SurfacePoint b,
                     double tol) {
  SurfacePoint ca = canonical_point(s, a), cb = canonical_point(s, b);
  if (ca.poly == cb.poly && norm(ca.pos - cb.pos) <= tol) return true;
  // points straddling an edge within tol can still canonicalize differently
  if (a.poly == b.poly && norm(a.pos - b.pos) <= tol) return true;
  return false;
}

}  // namespace flatkhinchin
