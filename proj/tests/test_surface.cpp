#include <cmath>

#include "doctest.h"
#include "flatkhinchin/io.hpp"
#include "flatkhinchin/surface.hpp"

#include <nlohmann/json.hpp>

using namespace flatkhinchin;

namespace {

PolygonSpec unit_square() {
  return PolygonSpec::from_rational({{Rational(0), Rational(0)},
                                     {Rational(1), Rational(0)},
                                     {Rational(1), Rational(1)},
                                     {Rational(0), Rational(1)}});
}

}  // namespace

TEST_CASE("unit square with opposite sides glued is a torus") {
  auto s = build_surface({unit_square()}, {{0, 0, 0, 2}, {0, 1, 0, 3}});
  CHECK(s.genus() == 1);
  CHECK(s.total_area() == doctest::Approx(1.0));
  CHECK(s.num_classes() == 1);
  CHECK(s.class_angle(0) == doctest::Approx(kTwoPi));
  CHECK(s.singularities().empty());  // no cone points, nothing marked
  CHECK(s.sigma() == 1.0);           // torus convention
}

TEST_CASE("regular octagon: genus two, one 6pi cone point") {
  auto s = builtin_surface("regular_octagon");
  CHECK(s.genus() == 2);
  CHECK(s.sigma() == doctest::Approx(0.5));
  auto sing = s.singularities();
  REQUIRE(sing.size() == 1);
  CHECK(sing[0].multiplicity == 2);
  CHECK(sing[0].cone_angle == doctest::Approx(3.0 * kTwoPi));
  CHECK(s.multiplicity_sum() == 2);
  // Gauss-Bonnet by direct vertex-class traversal
  double excess = 0;
  for (int c = 0; c < s.num_classes(); ++c) excess += s.class_angle(c) - kTwoPi;
  CHECK(excess == doctest::Approx(kTwoPi * (2 * s.genus() - 2)).epsilon(1e-9));
}

TEST_CASE("unpaired and mismatched edges are rejected") {
  CHECK_THROWS_AS(build_surface({unit_square()}, {{0, 0, 0, 2}}), UnpairedEdgeError);
  CHECK_THROWS_AS(build_surface({unit_square()}, {{0, 0, 0, 1}, {0, 2, 0, 3}}),
                  MismatchedEdgeError);
}

TEST_CASE("clockwise polygon is degenerate") {
  PolygonSpec cw;
  cw.vertices = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  CHECK_THROWS_AS(build_surface({cw}, {{0, 0, 0, 2}, {0, 1, 0, 3}}),
                  DegenerateSurfaceError);
}

TEST_CASE("builtin surfaces") {
  SUBCASE("square torus") {
    auto s = builtin_surface("square_torus");
    CHECK(s.genus() == 1);
    CHECK(s.total_area() == doctest::Approx(1.0));
    // the origin is marked so saddle connections exist
    auto sing = s.singularities();
    REQUIRE(sing.size() == 1);
    CHECK(sing[0].marked);
    CHECK(sing[0].multiplicity == 0);
    CHECK(s.multiplicity_sum() == 0);
  }
  SUBCASE("L(2,2)") {
    auto s = builtin_surface("L(2,2)");
    CHECK(s.genus() == 2);
    CHECK(s.sigma() == doctest::Approx(0.5));
    CHECK(s.total_area() == doctest::Approx(3.0));
    REQUIRE(s.singularities().size() == 1);
    CHECK(s.singularities()[0].cone_angle == doctest::Approx(3.0 * kTwoPi));
  }
  SUBCASE("L(5/2,3/2) keeps exact rational input") {
    auto s = builtin_surface("L(5/2,3/2)");
    CHECK(s.exact_input());
    CHECK(s.genus() == 2);
    CHECK(s.total_area() == doctest::Approx(3.0));  // a + b - 1
  }
  SUBCASE("bad parameters") {
    CHECK_THROWS_AS(builtin_surface("L(1,2)"), BadParameterError);
    CHECK_THROWS_AS(builtin_surface("shuriken"), BadParameterError);
  }
}

TEST_CASE("sigma lies in (0, 1/2] for higher genus") {
  for (const char* name : {"L(2,2)", "regular_octagon"}) {
    auto s = builtin_surface(name);
    CHECK(s.sigma() > 0);
    CHECK(s.sigma() <= 0.5);
  }
}

TEST_CASE("covering constant formula") {
  SUBCASE("m=1, s=1") {
    auto c = covering_constant_formula(1, 1.0);
    REQUIRE(c.value.has_value());
    CHECK(*c.value == doctest::Approx(65536.0));
  }
  SUBCASE("m=2, s=1 only fits as a logarithm") {
    auto c = covering_constant_formula(2, 1.0);
    CHECK(c.log2_value == doctest::Approx(256.0));
  }
  SUBCASE("m=1, s=4") {
    auto c = covering_constant_formula(1, 4.0);
    REQUIRE(c.value.has_value());
    CHECK(*c.value == doctest::Approx(131072.0));
  }
  SUBCASE("guards") {
    CHECK_THROWS_AS(covering_constant_formula(65, 1.0), OverflowError);
    CHECK_THROWS_AS(covering_constant_formula(1, 0.0), BadParameterError);
  }
}

TEST_CASE("serialization round trip preserves the invariants") {
  for (const char* name : {"square_torus", "L(2,2)", "regular_octagon"}) {
    auto s = builtin_surface(name);
    auto doc = surface_to_json(s);
    auto s2 = surface_from_json(doc);
    CHECK(s2.genus() == s.genus());
    CHECK(s2.total_area() == doctest::Approx(s.total_area()).epsilon(1e-12));
    REQUIRE(s2.num_classes() == s.num_classes());
    CHECK(s2.singularities().size() == s.singularities().size());
    for (int c = 0; c < s.num_classes(); ++c)
      CHECK(s2.class_angle(c) == doctest::Approx(s.class_angle(c)).epsilon(1e-12));
  }
}

TEST_CASE("spec files accept rational strings") {
  const char* text = R"({
    "polygons": [[["0","0"], ["1/1","0"], ["1","1"], ["0","1.0"]]],
    "gluings": [[0,0,0,2],[0,1,0,3]],
    "marked_points": [[0,0]]
  })";
  auto s = surface_from_json_text(text);
  CHECK(s.exact_input());
  CHECK(s.genus() == 1);
  REQUIRE(s.singularities().size() == 1);
  CHECK(s.singularities()[0].marked);
}

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("3/4").to_double() == 0.75);
  CHECK(Rational::parse("-1.25") == Rational(-5, 4));
  CHECK(Rational::parse("7") == Rational(7));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK_THROWS(Rational(1, 0));
}
