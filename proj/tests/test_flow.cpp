#include <cmath>

#include "doctest.h"
#include "flatkhinchin/flow.hpp"
#include "flatkhinchin/rng.hpp"
#include "flatkhinchin/surface.hpp"
#include "oracles.hpp"

using namespace flatkhinchin;

TEST_CASE("horizontal translation on the torus") {
  auto s = builtin_surface("square_torus");
  auto p = flow_point(s, {0, {0.25, 0.5}}, Direction(0), 0.5);
  CHECK(p.pos.x == doctest::Approx(0.75));
  CHECK(p.pos.y == doctest::Approx(0.5));

  // one full wrap comes back
  auto q = flow_point(s, {0, {0.25, 0.5}}, Direction(0), 1.0);
  CHECK(oracles::wrap_dist(q.pos.x, 0.25) < 1e-12);
  CHECK(q.pos.y == doctest::Approx(0.5));
}

TEST_CASE("irrational slope matches the mod-1 closed form at t=100") {
  auto s = builtin_surface("square_torus");
  double tau = std::atan(std::sqrt(2.0) - 1.0) / kTwoPi;
  auto p = flow_point(s, {0, {0.25, 0.5}}, Direction(tau), 100.0);
  auto [ex, ey] = oracles::torus_flow(0.25, 0.5, tau, 100.0);
  CHECK(oracles::wrap_dist(p.pos.x, ex) < 1e-9);
  CHECK(oracles::wrap_dist(p.pos.y, ey) < 1e-9);
}

TEST_CASE("torus oracle over random samples") {
  auto s = builtin_surface("square_torus");
  SplitMix64 rng(12345);
  for (int i = 0; i < 2000; ++i) {
    double x = rng.uniform(), y = rng.uniform();
    double tau = rng.uniform(), t = rng.uniform() * 1000.0;
    SurfacePoint p{};
    try {
      p = flow_point(s, {0, {x, y}}, Direction(tau), t);
    } catch (const SingularityHitError&) {
      continue;  // measure-zero marked-point hit
    }
    auto [ex, ey] = oracles::torus_flow(x, y, tau, t);
    CHECK(oracles::wrap_dist(p.pos.x, ex) < 1e-9);
    CHECK(oracles::wrap_dist(p.pos.y, ey) < 1e-9);
  }
}

TEST_CASE("diagonal from the marked corner hits it again at sqrt(2)") {
  auto s = builtin_surface("square_torus");
  auto events = trace(s, {0, {0, 0}}, Direction(0.125), 10.0);
  REQUIRE(!events.empty());
  CHECK(events.back().kind == TrajectoryEvent::Kind::singularity_hit);
  CHECK(events.back().time == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("horizontal trace wraps twice in time 2.5") {
  auto s = builtin_surface("square_torus");
  auto events = trace(s, {0, {0.5, 0.5}}, Direction(0), 2.5);
  int crossings = 0;
  for (const auto& ev : events)
    if (ev.kind == TrajectoryEvent::Kind::edge_crossing) ++crossings;
  CHECK(crossings == 2);
  REQUIRE(events.back().kind == TrajectoryEvent::Kind::time_reached);
  CHECK(canonical_equal(s, events.back().point, {0, {0.0, 0.5}}, 1e-9));
}

TEST_CASE("horizontal orbits in the two arms of L(2,2)") {
  auto s = builtin_surface("L(2,2)");
  // bottom arm: period-2 core, one wrap crossing per period
  auto ev1 = trace(s, {0, {0.5, 0.5}}, Direction(0), 2.0 - 1e-9);
  int c1 = 0;
  for (const auto& ev : ev1)
    if (ev.kind == TrajectoryEvent::Kind::edge_crossing) ++c1;
  CHECK(c1 == 1);
  auto back = flow_point(s, {0, {0.5, 0.5}}, Direction(0), 2.0);
  CHECK(norm(back.pos - Vec2{0.5, 0.5}) < 1e-9);
  // upper arm: period-1 core
  auto up = flow_point(s, {0, {0.5, 1.5}}, Direction(0), 1.0);
  CHECK(norm(up.pos - Vec2{0.5, 1.5}) < 1e-9);
}

TEST_CASE("step limit reports near-singular tracing") {
  auto s = builtin_surface("square_torus");
  FlowOptions opt;
  opt.max_crossings = 3;
  CHECK_THROWS_AS(trace(s, {0, {0.5, 0.5}}, Direction(0), 100.0, opt),
                  StepLimitError);
}

TEST_CASE("flat distance on the torus") {
  auto s = builtin_surface("square_torus");
  SUBCASE("wrap-around beats the long way") {
    auto d = distance(s, {0, {0.1, 0.5}}, {0, {0.9, 0.5}});
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(0.2));
  }
  SUBCASE("identity") {
    auto d = distance(s, {0, {0.3, 0.7}}, {0, {0.3, 0.7}});
    REQUIRE(d.has_value());
    CHECK(*d == 0.0);
  }
  SUBCASE("diagonal wrap passes straight through the marked point") {
    auto d = distance(s, {0, {0.1, 0.1}}, {0, {0.9, 0.9}});
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(std::sqrt(0.08)));
  }
  SUBCASE("cutoff is reported") {
    DistanceOptions opt;
    opt.r_max = 0.05;
    CHECK(!distance(s, {0, {0.1, 0.5}}, {0, {0.5, 0.5}}, opt).has_value());
  }
}

TEST_CASE("flow is reversible and additive") {
  auto s = builtin_surface("L(2,2)");
  SplitMix64 rng(99);
  int done = 0;
  while (done < 60) {
    double x = rng.uniform() * 2.0, y = rng.uniform() * 2.0;
    if (!point_in_polygon(s.polygon(0), {x, y}, -1e-9)) continue;
    double tau = rng.uniform();
    double t1 = rng.uniform() * 50.0, t2 = rng.uniform() * 50.0;
    try {
      auto fwd = flow_point(s, {0, {x, y}}, Direction(tau), t1);
      auto back = flow_point(s, fwd, Direction(tau), -t1);
      CHECK(canonical_equal(s, back, {0, {x, y}}, 1e-9));
      auto ab = flow_point(s, fwd, Direction(tau), t2);
      auto once = flow_point(s, {0, {x, y}}, Direction(tau), t1 + t2);
      CHECK(canonical_equal(s, ab, once, 1e-9));
    } catch (const SingularityHitError&) {
      continue;
    }
    ++done;
  }
}

TEST_CASE("reversibility survives long orbits") {
  auto s = builtin_surface("square_torus");
  double tau = 0.2137;
  auto fwd = flow_point(s, {0, {0.3, 0.3}}, Direction(tau), 1e4);
  auto back = flow_point(s, fwd, Direction(tau), -1e4);
  CHECK(canonical_equal(s, back, {0, {0.3, 0.3}}, 1e-9));
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  auto s = builtin_surface("L(2,2)");
  SplitMix64 rng(7);
  auto sample = [&]() {
    while (true) {
      Vec2 q{rng.uniform() * 2.0, rng.uniform() * 2.0};
      if (point_in_polygon(s.polygon(0), q, -1e-9)) return SurfacePoint{0, q};
    }
  };
  int done = 0;
  while (done < 25) {
    auto a = sample(), b = sample(), c = sample();
    auto dab = distance(s, a, b), dba = distance(s, b, a);
    auto dac = distance(s, a, c), dcb = distance(s, c, b);
    if (!dab || !dba || !dac || !dcb) continue;
    CHECK(*dab == doctest::Approx(*dba).epsilon(1e-9));
    CHECK(*dab <= *dac + *dcb + 1e-9);
    ++done;
  }
}

TEST_CASE("transverse flows separate at rate |sin(delta)| t") {
  auto s = builtin_surface("L(2,2)");
  // x deep inside a polygon, both traces stay within a singularity-free ball
  SurfacePoint x{0, {1.5, 0.5}};
  double tau = 0.03, tau2 = 0.07, t = 0.2;
  double delta = kTwoPi * (tau - tau2);
  auto p = flow_point(s, x, Direction(tau), t * std::cos(delta));
  auto q = flow_point(s, x, Direction(tau2), t);
  auto d = distance(s, p, q);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(std::fabs(std::sin(delta)) * t).epsilon(1e-9));
}
