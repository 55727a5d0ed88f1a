#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "flatkhinchin/cylinders.hpp"
#include "flatkhinchin/flow.hpp"
#include "flatkhinchin/surface.hpp"
#include "oracles.hpp"

using namespace flatkhinchin;

TEST_CASE("saddle connections of the marked torus up to 1.5") {
  auto s = builtin_surface("square_torus");
  auto scs = enumerate_saddle_connections(s, 1.5);
  REQUIRE(scs.size() == 8);  // 4 unoriented holonomies, both orientations
  std::multiset<std::pair<long, long>> got;
  for (const auto& sc : scs)
    got.insert({std::lround(sc.holonomy.x), std::lround(sc.holonomy.y)});
  std::multiset<std::pair<long, long>> want{{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                            {1, 1},  {-1, -1}, {-1, 1}, {1, -1}};
  CHECK(got == want);
  // sorted by (norm, tau)
  for (std::size_t i = 1; i < scs.size(); ++i)
    CHECK(scs[i - 1].length() <= scs[i].length() + 1e-12);
}

TEST_CASE("no saddle connection shorter than the lattice") {
  auto s = builtin_surface("square_torus");
  CHECK(enumerate_saddle_connections(s, 0.5).empty());
}

TEST_CASE("L(2,2) has unit horizontal and vertical saddle connections") {
  auto s = builtin_surface("L(2,2)");
  auto scs = enumerate_saddle_connections(s, 1.01);
  bool horiz = false, vert = false;
  for (const auto& sc : scs) {
    if (norm(sc.holonomy - Vec2{1, 0}) < 1e-9) horiz = true;
    if (norm(sc.holonomy - Vec2{0, 1}) < 1e-9) vert = true;
  }
  CHECK(horiz);
  CHECK(vert);
}

TEST_CASE("shortest saddle connection lengths") {
  CHECK(builtin_surface("square_torus").shortest_saddle() == doctest::Approx(1.0));
  CHECK(builtin_surface("L(2,2)").shortest_saddle() == doctest::Approx(1.0));
  // the octagon's sides are saddle connections of length one
  CHECK(builtin_surface("regular_octagon").shortest_saddle() ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("square torus cylinders up to 1.5") {
  auto s = builtin_surface("square_torus");
  auto cyls = enumerate_cylinders(s, 1.5, 1.0);
  REQUIRE(cyls.size() == 4);
  for (const auto& c : cyls) {
    CHECK(c.area_fraction == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.height == doctest::Approx(1.0 / c.core_length).epsilon(1e-9));
  }
  std::multiset<long> taus;
  for (const auto& c : cyls) taus.insert(std::lround(c.direction.tau * 1000));
  CHECK(taus == std::multiset<long>{0, 125, 250, 375});
}

TEST_CASE("cylinder sequence ordering and counts") {
  auto s = builtin_surface("square_torus");
  SUBCASE("short cores come first") {
    auto seq = cylinder_sequence(s, 2.0);
    REQUIRE(!seq.empty());
    CHECK(seq.front().direction.tau == doctest::Approx(0.0));
    CHECK(seq.front().core_length == doctest::Approx(1.0));
    for (std::size_t i = 1; i < seq.size(); ++i) {
      bool ordered = seq[i - 1].core_length < seq[i].core_length + 1e-12;
      if (std::fabs(seq[i - 1].core_length - seq[i].core_length) < 1e-12)
        ordered = seq[i - 1].direction.tau <= seq[i].direction.tau;
      CHECK(ordered);
    }
  }
  SUBCASE("count matches the primitive-vector oracle at L=10") {
    CHECK(static_cast<long>(cylinder_sequence(s, 10.0).size()) ==
          oracles::primitive_count(10.0));
  }
  SUBCASE("nothing below the lattice scale") {
    CHECK(cylinder_sequence(s, 0.5).empty());
  }
}

TEST_CASE("cores close up at their period") {
  for (const char* name : {"square_torus", "L(2,2)"}) {
    auto s = builtin_surface(name);
    for (const auto& c : cylinder_sequence(s, 6.0)) {
      auto p = flow_point(s, c.witness, Direction(c.tau_aligned), c.core_length);
      CHECK(norm(p.pos - c.witness.pos) < 1e-9);
      CHECK(p.poly == c.witness.poly);
    }
  }
}

TEST_CASE("horizontal decomposition of L(2,2) fills the surface") {
  auto s = builtin_surface("L(2,2)");
  auto cyls = enumerate_cylinders(s, 2.01, 0.25);
  double horizontal_area = 0;
  int horizontal = 0;
  for (const auto& c : cyls) {
    if (c.direction.tau < 1e-12) {
      horizontal_area += c.area_fraction;
      ++horizontal;
    }
  }
  CHECK(horizontal == 2);
  CHECK(horizontal_area == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cylinders are maximal bands") {
  auto s = builtin_surface("L(2,2)");
  for (const auto& c : cylinder_sequence(s, 2.01)) {
    // leaves strictly inside still close up...
    for (double off : {0.49, -0.49}) {
      auto p = flow_point(s, c.witness, Direction(c.chord_tau), off * c.height);
      auto back = flow_point(s, p, Direction(c.tau_aligned), c.core_length);
      CHECK(canonical_equal(s, back, p, 1e-9));
    }
    // ...and the witness sits in the open cylinder
    CHECK(cylinder_contains(s, c, c.witness));
  }
}

TEST_CASE("membership distinguishes parallel cylinders") {
  auto s = builtin_surface("L(2,2)");
  auto cyls = enumerate_cylinders(s, 2.01, 0.25);
  const Cylinder* wide = nullptr;
  const Cylinder* narrow = nullptr;
  for (const auto& c : cyls) {
    if (c.direction.tau > 1e-12) continue;
    if (c.core_length > 1.5) {
      wide = &c;
    } else {
      narrow = &c;
    }
  }
  REQUIRE(wide);
  REQUIRE(narrow);
  CHECK(!cylinder_contains(s, *wide, narrow->witness));
  CHECK(!cylinder_contains(s, *narrow, wide->witness));
}

TEST_CASE("quadratic growth of the cylinder count") {
  auto s = builtin_surface("square_torus");
  auto n25 = static_cast<double>(cylinder_sequence(s, 25.0).size());
  auto n50 = static_cast<double>(cylinder_sequence(s, 50.0).size());
  CHECK(n50 / n25 > 3.5);
  CHECK(n50 / n25 < 4.5);
}

TEST_CASE("sector enumeration agrees with the full one") {
  auto s = builtin_surface("L(2,2)");
  double theta = 0.2345, hw = 0.01;
  auto sector = enumerate_cylinders_in_sector(s, 10.0, s.sigma(), theta, hw);
  auto full = cylinder_sequence(s, 10.0);
  long expected = 0;
  for (const auto& c : full) {
    double d = std::min(turn_distance(c.direction.tau, theta),
                        turn_distance(c.direction.tau + 0.5, theta));
    if (d <= hw - 1e-9) ++expected;
  }
  CHECK(static_cast<long>(sector.size()) >= expected);
  for (const auto& c : sector) {
    double d = std::min(turn_distance(c.direction.tau, theta),
                        turn_distance(c.direction.tau + 0.5, theta));
    CHECK(d <= hw + 1e-6);
  }
}

TEST_CASE("enumeration rejects bad parameters") {
  auto s = builtin_surface("square_torus");
  CHECK_THROWS_AS(enumerate_cylinders(s, -1.0, 0.5), BadParameterError);
  CHECK_THROWS_AS(enumerate_cylinders(s, 2.0, 0.0), BadParameterError);
  CHECK_THROWS_AS(enumerate_cylinders(s, 2.0, 1.5), BadParameterError);
}

TEST_CASE("surfaces without marked points cannot seed the search") {
  PolygonSpec sq = PolygonSpec::from_rational({{Rational(0), Rational(0)},
                                               {Rational(1), Rational(0)},
                                               {Rational(1), Rational(1)},
                                               {Rational(0), Rational(1)}});
  auto bare = build_surface({sq}, {{0, 0, 0, 2}, {0, 1, 0, 3}});
  CHECK_THROWS_AS(enumerate_saddle_connections(bare, 2.0), NoCylindersError);
}
