#pragma once

#include <vector>

#include "flatkhinchin/flow.hpp"
#include "flatkhinchin/sequences.hpp"
#include "flatkhinchin/surface.hpp"

namespace flatkhinchin {

/// Straight segment embedded in the surface, used as a cross-section of the
/// flow. The interior must avoid singularities; endpoints may sit on them.
class Transversal {
 public:
  Transversal(const TranslationSurface& s, SurfacePoint base, Direction dir,
              double length);

  struct ChainSeg {
    int poly;
    Vec2 a, b;
    double s0, s1;  // arc-length parameters along the transversal
  };

  const std::vector<ChainSeg>& chain() const { return chain_; }
  const std::vector<int>& segs_in_poly(int poly) const;
  double length() const { return length_; }
  Direction dir() const { return dir_; }
  bool closed() const { return closed_; }
  SurfacePoint base() const { return base_; }

  /// Surface point at arc-length parameter u in [0, length].
  SurfacePoint point_at(double u) const;

 private:
  const TranslationSurface* s_;
  SurfacePoint base_;
  Direction dir_;
  double length_;
  bool closed_ = false;
  std::vector<ChainSeg> chain_;
  std::vector<std::vector<int>> by_poly_;
  std::vector<int> empty_;
};

/// Piecewise translation of [0, domain_length). Pieces are
/// [breakpoint[i], breakpoint[i+1]) with per-piece shifts; images tile the
/// domain. `closed` selects the wrap-around metric for recurrence distances.
struct Iet {
  double domain_length = 0;
  std::vector<double> breakpoints;   // strictly inside (0, domain_length)
  std::vector<double> translations;  // one per piece (breakpoints.size()+1)
  bool closed = false;

  int piece_index(double x) const;
  /// n-fold application; negative n uses the inverse exchange. Throws
  /// HitBreakpointError if the orbit lands exactly on a breakpoint.
  double apply(double x, long n = 1) const;

  Iet inverse() const;
};

struct FirstReturnOptions {
  /// Flow-length cap as a multiple of the transversal length.
  double cap_factor = 1e4;
};

/// First-return map of the flow in direction `dir` to the transversal.
/// Breakpoints are the transversal preimages of singularities (plus the
/// endpoint/cut preimages needed for the pieces to tile); per-piece shifts
/// are measured by flowing sample points and cross-checked.
Iet first_return_iet(const TranslationSurface& s, Direction dir,
                     const Transversal& t, FirstReturnOptions opt = {});

struct RecurrenceScan {
  std::vector<long> hits;            // n <= N with |T^n x - x| < a_n
  std::vector<double> hit_distances; // |T^n x - x| at those n
  double min_ratio = 0;              // min over n <= N of |T^n x - x| / a_n
  double tail_min_ratio = 0;         // same restricted to n > N/2 (liminf estimate)
  long first_hit = -1;
};

/// Orbit scan of the shrinking-target condition |T^n x - x| < a_n. Distance
/// uses the wrap-around metric when the transversal closes up.
RecurrenceScan recurrence_scan(const Iet& iet, double x, const SequenceSpec& seq,
                               long N);

}  // namespace flatkhinchin
