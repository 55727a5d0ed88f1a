#pragma once

#include <vector>

#include "flatkhinchin/flow.hpp"
#include "flatkhinchin/surface.hpp"

namespace flatkhinchin {

/// Geodesic segment between singularities (or marked points) with none in
/// its interior. Oriented; the reverse segment is listed separately.
struct SaddleConnection {
  Vec2 holonomy;
  int start_class = 0;
  int end_class = 0;
  SurfacePoint start_point;  // the start vertex, in the wedge's polygon
  int start_vertex = 0;      // vertex index in start_point.poly

  double length() const { return norm(holonomy); }
  double tau() const { return vector_tau(holonomy); }
};

struct SaddleOptions {
  long max_states = 4000000;
  int max_depth = 4096;
};

/// All saddle connections of holonomy norm <= L, sorted by (norm, tau).
/// Candidates come from a visibility-fan development around each singular
/// vertex and are confirmed by tracing the actual separatrix.
std::vector<SaddleConnection> enumerate_saddle_connections(
    const TranslationSurface& s, double L, SaddleOptions opt = {});

/// Saddle connections whose direction lies within `halfwidth` (turns) of
/// `tau_center` or its reversal. Much cheaper than a full enumeration when
/// the window is narrow.
std::vector<SaddleConnection> enumerate_saddle_connections_in_sector(
    const TranslationSurface& s, double L, double tau_center, double halfwidth,
    SaddleOptions opt = {});

double shortest_saddle(const TranslationSurface& s);

/// Maximal periodic cylinder. `direction` is unoriented (tau in [0,1/2));
/// core_length is the circumference of the closed core geodesics and
/// area_fraction = core_length*height/total_area.
struct Cylinder {
  Direction direction{0};
  double core_length = 0;
  double height = 0;
  double area_fraction = 0;
  SurfacePoint witness;  // on the mid leaf

  // Cross-section chord used for membership tests: from `chord_base` (on one
  // boundary circle) the perpendicular in direction `chord_tau` spans the
  // full height.
  SurfacePoint chord_base;
  double chord_tau = 0;
  double tau_aligned = 0;  // orientation the witness data was built with
};

struct CylinderOptions {
  SaddleOptions saddle;
  /// Offset used to probe closed leaves next to a boundary saddle
  /// connection, as a multiple of the shortest edge.
  double probe_offset_factor = 1e-6;
};

/// All maximal cylinders with core_length < L and area_fraction >= min_area
/// (up to 1e-9 relative slack on the area cut).
std::vector<Cylinder> enumerate_cylinders(const TranslationSurface& s, double L,
                                          double min_area, CylinderOptions opt = {});

/// Cylinders whose (unoriented) direction is within `halfwidth` turns of
/// `tau_center` in either orientation.
std::vector<Cylinder> enumerate_cylinders_in_sector(const TranslationSurface& s,
                                                    double L, double min_area,
                                                    double tau_center,
                                                    double halfwidth,
                                                    CylinderOptions opt = {});

/// Cylinders of area at least sigma ordered by (core_length, direction):
/// the enumerated initial segment of the surface's cylinder sequence.
std::vector<Cylinder> cylinder_sequence(const TranslationSurface& s, double L,
                                        CylinderOptions opt = {});

/// Membership test with the cylinder's cross-section chord traced once: a
/// point lies in the cylinder iff its forward orbit in the cylinder
/// direction crosses the chord within one period.
class CylinderMembership {
 public:
  CylinderMembership(const TranslationSurface& s, const Cylinder& c);
  bool contains(SurfacePoint x) const;

 private:
  const TranslationSurface* s_;
  Cylinder c_;
  struct Seg {
    int poly;
    Vec2 a, b;
  };
  std::vector<Seg> chord_;
  std::vector<std::vector<int>> by_poly_;
};

bool cylinder_contains(const TranslationSurface& s, const Cylinder& c, SurfacePoint x);

/// Point at cylinder coordinates: arc `along` in [0,T) on the leaf through
/// the witness shifted `across` in (-h/2, h/2) from the mid leaf.
SurfacePoint cylinder_point(const TranslationSurface& s, const Cylinder& c,
                            double along, double across);

}  // namespace flatkhinchin
