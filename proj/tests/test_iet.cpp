#include <cmath>

#include "doctest.h"
#include "flatkhinchin/flow.hpp"
#include "flatkhinchin/iet.hpp"
#include "flatkhinchin/rng.hpp"
#include "flatkhinchin/surface.hpp"
#include "oracles.hpp"

using namespace flatkhinchin;

namespace {

Transversal torus_circle(const TranslationSurface& s) {
  return Transversal(s, {0, {0, 0}}, Direction(0), 1.0);
}

double golden_tau() { return std::atan((std::sqrt(5.0) - 1.0) / 2.0) / kTwoPi; }

Iet rotation(double alpha) {
  Iet iet;
  iet.domain_length = 1.0;
  iet.breakpoints = {1.0 - alpha};
  iet.translations = {alpha, alpha - 1.0};
  iet.closed = true;
  return iet;
}

}  // namespace

TEST_CASE("golden slope gives the golden rotation") {
  auto s = builtin_surface("square_torus");
  auto t = torus_circle(s);
  CHECK(t.closed());
  Iet iet = first_return_iet(s, Direction(golden_tau()), t);
  double alpha = (std::sqrt(5.0) - 1.0) / 2.0;
  REQUIRE(iet.breakpoints.size() == 1);
  REQUIRE(iet.translations.size() == 2);
  CHECK(iet.breakpoints[0] == doctest::Approx(1.0 - alpha).epsilon(1e-12));
  CHECK(iet.translations[0] == doctest::Approx(alpha).epsilon(1e-12));
  CHECK(iet.translations[1] == doctest::Approx(alpha - 1.0).epsilon(1e-12));
}

TEST_CASE("slope two returns as rotation by one half") {
  auto s = builtin_surface("square_torus");
  double tau = std::atan(2.0) / kTwoPi;  // rotation by cot = 1/2
  Iet iet = first_return_iet(s, Direction(tau), torus_circle(s));
  REQUIRE(iet.translations.size() == 2);
  CHECK(iet.breakpoints[0] == doctest::Approx(0.5));
  CHECK(std::fabs(iet.translations[0]) == doctest::Approx(0.5));
}

TEST_CASE("first return on L(2,2) across both arms") {
  auto s = builtin_surface("L(2,2)");
  // closed horizontal circle of length 2 through the bottom arm
  Transversal t(s, {0, {0, 0.5}}, Direction(0), 2.0);
  CHECK(t.closed());
  double tau = 0.13;
  Iet iet = first_return_iet(s, Direction(tau), t);
  CHECK(iet.breakpoints.size() >= 3);
  // cross-validation against direct flow returns
  SplitMix64 rng(404);
  Vec2 fu = Direction(tau).unit();
  int checked = 0;
  while (checked < 200) {
    double u = rng.uniform() * iet.domain_length;
    double v;
    try {
      v = iet.apply(u, 1);
    } catch (const HitBreakpointError&) {
      continue;
    }
    // measure the true return by flowing from the transversal point
    SurfacePoint x = t.point_at(u);
    FlowOptions fo;
    fo.max_crossings = 100000;
    PathTracer tr(s, x, fu, fo);
    double measured = -1;
    while (measured < 0) {
      auto st = tr.advance(1e4);
      if (st.t1 > st.t0) {
        Vec2 pd = st.to - st.from;
        for (int i : t.segs_in_poly(st.poly)) {
          const auto& sg = t.chain()[i];
          double r, w;
          if (!line_params(st.from, pd, sg.a, sg.b - sg.a, r, w)) continue;
          if (r < -1e-12 || r > 1 + 1e-12 || w < -1e-12 || w > 1 + 1e-12) continue;
          double th = st.t0 + std::clamp(r, 0.0, 1.0) * (st.t1 - st.t0);
          if (th <= 1e-9) continue;
          measured = sg.s0 + std::clamp(w, 0.0, 1.0) * (sg.s1 - sg.s0);
          break;
        }
      }
      if (!st.crossed) break;
    }
    REQUIRE(measured >= 0);
    CHECK(std::fabs(v - measured) < 1e-9);
    ++checked;
  }
}

TEST_CASE("exchange pieces are isometries that tile the domain") {
  auto s = builtin_surface("L(2,2)");
  Transversal t(s, {0, {0, 0.5}}, Direction(0), 2.0);
  Iet iet = first_return_iet(s, Direction(0.37), t);
  // isometry on pieces for random same-piece pairs
  SplitMix64 rng(911);
  std::vector<double> bounds{0.0};
  bounds.insert(bounds.end(), iet.breakpoints.begin(), iet.breakpoints.end());
  bounds.push_back(iet.domain_length);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t piece = 1 + std::size_t(rng.uniform() * (bounds.size() - 1.5));
    double lo = bounds[piece - 1], hi = bounds[piece];
    double x = lo + (hi - lo) * (0.01 + 0.98 * rng.uniform());
    double y = lo + (hi - lo) * (0.01 + 0.98 * rng.uniform());
    CHECK(std::fabs(iet.apply(x, 1) - iet.apply(y, 1)) ==
          doctest::Approx(std::fabs(x - y)).epsilon(1e-12));
  }
  // the images tile: total length is preserved
  double total = 0;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) total += bounds[i + 1] - bounds[i];
  CHECK(total == doctest::Approx(iet.domain_length).epsilon(1e-12));
}

TEST_CASE("apply obeys periodicity and the inverse") {
  Iet rot = rotation(0.25);
  CHECK(rot.apply(0.1, 4) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rot.apply(0.1, 0) == 0.1);
  Iet golden = rotation((std::sqrt(5.0) - 1.0) / 2.0);
  CHECK(golden.apply(0.0, 1) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0));
  SplitMix64 rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    double x = rng.uniform();
    long n = 1 + long(rng.uniform() * 40);
    try {
      CHECK(golden.apply(golden.apply(x, n), -n) == doctest::Approx(x).epsilon(1e-9));
    } catch (const HitBreakpointError&) {
    }
  }
}

TEST_CASE("orbits through a breakpoint abort") {
  Iet rot = rotation(0.25);
  CHECK_THROWS_AS(rot.apply(0.75, 1), HitBreakpointError);
  // 0.25 -> 0.5 -> 0.75 is hit at step 3
  try {
    rot.apply(0.25, 5);
    FAIL("expected HitBreakpointError");
  } catch (const HitBreakpointError& e) {
    CHECK(e.step == 3);
  }
}

TEST_CASE("golden rotation recurrence scan against the convergent oracle") {
  auto s = builtin_surface("square_torus");
  Iet iet = first_return_iet(s, Direction(golden_tau()), torus_circle(s));
  auto scan = recurrence_scan(iet, 0.3, SequenceSpec::parse("harmonic:1"), 100000);
  double alpha = iet.translations[0];

  // the minimum of n*||n alpha|| over all n <= N sits at a convergent
  double oracle_min = oracles::min_n_norm_nalpha(alpha, 100000);
  CHECK(scan.min_ratio == doctest::Approx(oracle_min).epsilon(1e-6));
  // for the golden rotation that is the n=1 value 1 - alpha = alpha^2
  CHECK(scan.min_ratio == doctest::Approx(1.0 - alpha).epsilon(1e-9));

  // the deep tail estimates the liminf 1/sqrt(5)
  CHECK(scan.tail_min_ratio > 0.4472);
  CHECK(scan.tail_min_ratio < 0.4473);

  // every convergent with n*||n alpha|| < 1 must appear among the hits
  auto oracle_hits = oracles::rotation_hits(alpha, 100000);
  for (long q : oracle_hits)
    CHECK(std::find(scan.hits.begin(), scan.hits.end(), q) != scan.hits.end());
  CHECK(scan.hits.size() >= 20);
}

TEST_CASE("rational rotation hits at every period") {
  Iet rot = rotation(0.25);
  auto scan = recurrence_scan(rot, 0.1, SequenceSpec::parse("harmonic:1"), 100);
  // distance zero at every multiple of the period, so those all hit
  for (long n = 4; n <= 100; n += 4)
    CHECK(std::find(scan.hits.begin(), scan.hits.end(), n) != scan.hits.end());
  for (std::size_t i = 0; i < scan.hits.size(); ++i)
    if (scan.hits[i] % 4 == 0) CHECK(scan.hit_distances[i] < 1e-12);
}

TEST_CASE("transversals reject singular interiors") {
  auto s = builtin_surface("L(2,2)");
  // the horizontal segment at height 1 runs through the cone point at (1,1)
  CHECK_THROWS_AS(Transversal(s, {0, {0.5, 1.0}}, Direction(0), 1.0),
                  SingularEndpointError);
}

TEST_CASE("parallel directions are rejected") {
  auto s = builtin_surface("square_torus");
  auto t = torus_circle(s);
  CHECK_THROWS_AS(first_return_iet(s, Direction(0.0), t), BadParameterError);
}
