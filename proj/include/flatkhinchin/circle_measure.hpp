#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flatkhinchin/cylinders.hpp"

namespace flatkhinchin {

/// Ball B(center, radius) on the circle [0,1). Radius >= 1/2 means the full
/// circle.
struct Arc {
  double center = 0;
  double radius = 0;
};

/// Finite union of disjoint sorted intervals within [0,1].
class ArcUnion {
 public:
  ArcUnion() = default;
  static ArcUnion from_arcs(const std::vector<Arc>& arcs);
  static ArcUnion from_intervals(std::vector<std::pair<double, double>> ivals);

  double measure() const;
  ArcUnion intersect(double j0, double j1) const;
  const std::vector<std::pair<double, double>>& intervals() const { return ivals_; }

  struct CoverResult {
    bool covers = false;
    double gap_center = 0;
    double gap_length = 0;  // largest uncovered gap
  };
  CoverResult cover_circle() const;

 private:
  std::vector<std::pair<double, double>> ivals_;
};

/// Exact measure of (union of arcs) intersected with [j0, j1).
double union_measure(const std::vector<Arc>& arcs, double j0, double j1);

ArcUnion::CoverResult covers_circle(const std::vector<Arc>& arcs);

/// Cylinder directions mirrored to both orientations (tau and tau+1/2) with
/// per-cylinder radii radius_of(core_length).
std::vector<Arc> direction_arcs(const std::vector<Cylinder>& cyls,
                                const std::function<double(double)>& radius_of);

struct CoveringSearch {
  double c_emp = 0;
  int cylinders = 0;
};

/// Smallest c (to 1e-6) so that the balls B(theta, c/(T*L)) over cylinders of
/// area >= sigma and core length < L cover the circle of directions.
CoveringSearch minimal_covering_constant(const TranslationSurface& s, double L,
                                         CylinderOptions opt = {});

struct KeyBoundReport {
  double measured = 0;     // measure of the arc union clipped to J
  double correction = 0;   // 2/(C1*N)^2
  double lambda_j = 0;
  std::optional<double> c2_candidate;  // (measured + correction)/lambda(J)
  int annulus_count = 0;   // cylinders with N <= T < C1*N near J
};

/// Mass near J contributed by balls of radius 1/(C1*N)^2 around directions of
/// cylinders with core length in [N, C1*N).
KeyBoundReport key_bound_report(const TranslationSurface& s, double N, double j0,
                                double j1, double C1, CylinderOptions opt = {});

}  // namespace flatkhinchin
