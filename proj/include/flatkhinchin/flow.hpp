#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "flatkhinchin/surface.hpp"

namespace flatkhinchin {

struct TrajectoryEvent {
  enum class Kind { edge_crossing, singularity_hit, time_reached };
  Kind kind;
  double time;
  SurfacePoint point;
};

struct FlowOptions {
  /// Crossing cap; <0 means 10*t/shortest_edge (with a floor).
  long max_crossings = -1;
  /// Continue straight through vertices of total angle exactly 2*pi instead
  /// of reporting a hit. Used by the metric (marked points do not bend
  /// geodesics); the flow itself keeps them blocking.
  bool pass_flat_vertices = false;
};

/// Polygon-by-polygon straight-line tracer. Each advance() yields the
/// segment traversed inside one polygon, crossing at most one gluing.
class PathTracer {
 public:
  PathTracer(const TranslationSurface& s, SurfacePoint start, Vec2 dir_unit,
             FlowOptions opt = {});

  struct Step {
    int poly;
    Vec2 from;
    Vec2 to;
    double t0;
    double t1;
    bool crossed;  // false when the step ended by reaching t_stop
    int edge = -1; // crossed edge in `poly`
  };

  /// Advance until time `t_stop` or the next edge crossing, whichever comes
  /// first. Throws SingularityHitError on cone/marked-point hits.
  Step advance(double t_stop);

  double elapsed() const { return elapsed_; }
  SurfacePoint position() const { return {poly_, pos_}; }
  long crossings() const { return crossings_; }

 private:
  const TranslationSurface& s_;
  FlowOptions opt_;
  int poly_;
  Vec2 pos_;
  Vec2 dir_;
  double elapsed_ = 0;
  long crossings_ = 0;
  int zero_steps_ = 0;

  struct Exit {
    double t;
    int edge;
    double s;  // parameter along the edge in [0,1]
  };
  std::optional<Exit> find_exit() const;
  std::optional<Exit> find_exit_impl(int exclude_vertex) const;
  void cross_edge(const Exit& e);
};

/// Position at time t of the unit-speed straight-line flow in direction
/// `dir`; negative t flows backward. Throws SingularityHitError when the
/// path meets a cone point or marked point.
SurfacePoint flow_point(const TranslationSurface& s, SurfacePoint x, Direction dir,
                        double t, FlowOptions opt = {});

/// Instrumented flow: ordered event log ending in time_reached or
/// singularity_hit. Throws StepLimitError past the crossing cap.
std::vector<TrajectoryEvent> trace(const TranslationSurface& s, SurfacePoint x,
                                   Direction dir, double t_max, FlowOptions opt = {});

struct DistanceOptions {
  double r_max = -1;   // <0: half the shortest saddle (or half scale without one)
  int max_depth = 64;  // gluing crossings per development path
  long max_states = 200000;
};

/// Flat distance realized by a straight development path of length <= r_max.
/// Returns nullopt when no such path exists (distance exceeds the cutoff).
/// Straight paths may run through marked (2*pi) points.
std::optional<double> distance(const TranslationSurface& s, SurfacePoint x,
                               SurfacePoint y, DistanceOptions opt = {});

/// Visibility-fan development around `center` (a point of `start_poly`):
/// visits every developed polygon copy (polygon + offset) that a straight
/// segment from the center with direction in [wedge_lo, wedge_hi] (radians)
/// and length <= radius can reach, along with the narrowed angular window.
/// Branches whose window closes are pruned, which keeps the development
/// finite even when the gluing translations generate a dense group.
void develop_fan(
    const TranslationSurface& s, int start_poly, Vec2 center, double radius,
    double wedge_lo, double wedge_hi, int max_depth, long max_states,
    const std::function<void(int poly, Vec2 offset, double lo, double hi)>& visit);

}  // namespace flatkhinchin
