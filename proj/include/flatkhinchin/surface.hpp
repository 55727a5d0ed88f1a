#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "flatkhinchin/errors.hpp"
#include "flatkhinchin/rational.hpp"
#include "flatkhinchin/vec.hpp"

namespace flatkhinchin {

/// Simple counterclockwise polygon. `exact` carries rational coordinates
/// when the caller has them; validation is then exact.
struct PolygonSpec {
  std::vector<Vec2> vertices;
  std::optional<std::vector<RationalVec2>> exact;

  static PolygonSpec from_rational(std::vector<RationalVec2> pts) {
    PolygonSpec p;
    p.exact = std::move(pts);
    p.vertices.reserve(p.exact->size());
    for (const auto& q : *p.exact) p.vertices.push_back({q.x.to_double(), q.y.to_double()});
    return p;
  }
};

/// Edge `edge_a` of polygon `poly_a` is identified with edge `edge_b` of
/// polygon `poly_b` by a translation. Edge i runs from vertex i to i+1.
struct EdgeGluing {
  int poly_a = 0, edge_a = 0, poly_b = 0, edge_b = 0;
};

struct VertexRef {
  int poly = 0, vertex = 0;
  bool operator==(const VertexRef&) const = default;
};

struct SurfacePoint {
  int poly = 0;
  Vec2 pos;
};

struct SingularityInfo {
  int cls = 0;             // vertex-class id
  double cone_angle = 0;   // total angle, a multiple of 2*pi
  int multiplicity = 0;    // cone_angle = 2*pi*(multiplicity+1)
  bool marked = false;     // declared marked point (multiplicity 0)
  std::vector<VertexRef> corners;
};

class TranslationSurface {
 public:
  struct Polygon {
    std::vector<Vec2> v;       // ccw vertices
    std::vector<Vec2> evec;    // v[i+1] - v[i]
    std::vector<double> elen;
    int n = 0;
  };
  /// Crossing edge `edge` of a polygon: position += translation, landing on
  /// the partner edge of polygon `poly`.
  struct EdgeLink {
    int poly = -1;
    int edge = -1;
    Vec2 translation;
  };

  int num_polygons() const { return static_cast<int>(polys_.size()); }
  const Polygon& polygon(int p) const { return polys_[p]; }
  const EdgeLink& link(int poly, int edge) const { return links_[poly][edge]; }

  int vertex_class(int poly, int vertex) const { return vclass_[poly][vertex]; }
  int num_classes() const { return static_cast<int>(class_angle_.size()); }
  double class_angle(int cls) const { return class_angle_[cls]; }
  int class_multiplicity(int cls) const { return class_mult_[cls]; }
  bool class_marked(int cls) const { return class_marked_[cls]; }
  /// True when trajectories must stop there (cone point or marked point).
  bool class_blocking(int cls) const { return class_mult_[cls] > 0 || class_marked_[cls]; }
  /// True when the total angle is exactly 2*pi (straight continuation exists).
  bool class_flat(int cls) const { return class_mult_[cls] == 0; }

  std::vector<SingularityInfo> singularities() const;
  const std::vector<std::vector<VertexRef>>& class_corners() const { return class_corners_; }

  int genus() const { return genus_; }
  /// 1/(2g-2) for genus >= 2; by convention 1 for the torus.
  double sigma() const { return sigma_; }
  double total_area() const { return area_; }
  int multiplicity_sum() const { return mult_sum_; }

  double scale() const { return scale_; }
  double shortest_edge() const { return shortest_edge_; }
  double eps_sing() const { return 1e-12 * scale_; }
  bool exact_input() const { return exact_; }
  bool has_blocking() const { return has_blocking_; }

  /// Length of the shortest saddle connection. Computed on first use;
  /// requires at least one cone point or marked point.
  double shortest_saddle() const;

 private:
  friend TranslationSurface build_surface(std::vector<PolygonSpec>,
                                          std::vector<EdgeGluing>,
                                          std::vector<VertexRef>);
  std::vector<Polygon> polys_;
  std::vector<std::vector<EdgeLink>> links_;
  std::vector<std::vector<int>> vclass_;
  std::vector<double> class_angle_;
  std::vector<int> class_mult_;
  std::vector<char> class_marked_;
  std::vector<std::vector<VertexRef>> class_corners_;
  int genus_ = 0;
  double sigma_ = 0;
  double area_ = 0;
  double scale_ = 0;
  double shortest_edge_ = 0;
  int mult_sum_ = 0;
  bool exact_ = false;
  bool has_blocking_ = false;

  struct SaddleCache {
    std::once_flag once;
    double value = 0;
  };
  std::shared_ptr<SaddleCache> saddle_cache_ = std::make_shared<SaddleCache>();
};

TranslationSurface build_surface(std::vector<PolygonSpec> polygons,
                                 std::vector<EdgeGluing> gluings,
                                 std::vector<VertexRef> marked_points = {});

/// Test fixtures: "square_torus" (unit square, opposite sides glued, origin
/// marked), "L(a,b)" with rational a,b > 1, "regular_octagon" (unit sides,
/// opposite sides glued).
TranslationSurface builtin_surface(const std::string& name);

struct CoveringConstant {
  double log2_value = 0;
  std::optional<double> value;  // absent when 2^log2_value overflows double
};

/// 2^(2^(4m)) * sqrt(s), kept in log2 form; the plain value is also returned
/// while it fits in a double.
CoveringConstant covering_constant_formula(int multiplicity_sum, double shortest_saddle);
CoveringConstant covering_constant_formula(const TranslationSurface& s);

/// True if `pos` lies inside or on the boundary of polygon `p` (tolerance
/// `tol` in absolute units).
bool point_in_polygon(const TranslationSurface::Polygon& p, Vec2 pos, double tol);

/// Canonical representative for points on polygon boundaries: vertices map to
/// the lowest (poly,vertex) corner of their class, edge points to the lower
/// (poly,edge) side.
SurfacePoint canonical_point(const TranslationSurface& s, SurfacePoint x, double eps = -1.0);
bool canonical_equal(const TranslationSurface& s, SurfacePoint a, SurfacePoint b, double tol);

}  // namespace flatkhinchin
