#include <cmath>

#include "doctest.h"
#include "flatkhinchin/series.hpp"

using namespace flatkhinchin;

TEST_CASE("sum of i * i^{-3} approaches pi^2/6") {
  auto sums = partial_sums(SequenceSpec::parse("power:1,3"), 1000000);
  CHECK(sums.sum_i_ai == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-5));
}

TEST_CASE("sum of i * i^{-2} is the harmonic number") {
  auto sums = partial_sums(SequenceSpec::parse("power:1,2"), 1000000);
  double expect = std::log(1e6) + 0.57721566490153286;
  CHECK(sums.sum_i_ai == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("block bounds sandwich the weighted sum at every truncation") {
  const char* gens[] = {"harmonic:1", "power:2,1.5", "power:1,2",    "log:1,2",
                        "power:1,3",  "power:1,2.5", "power:2,3.5", "power:1,4"};
  for (const char* g : gens) {
    auto sums = partial_sums(SequenceSpec::parse(g), 1 << 16);
    REQUIRE(long(sums.sandwich_lower.size()) == sums.jmax);
    for (long j = 1; j <= sums.jmax; ++j) {
      double s = sums.sum_i_ai_at_pow2[j];
      CHECK(sums.sandwich_lower[j - 1] <= s);
      CHECK(s <= sums.sandwich_upper[j]);
    }
  }
}

TEST_CASE("weighted and sqrt-index series agree on the test battery") {
  // four divergent and four convergent under the i*a_i test
  struct Row {
    const char* gen;
    Verdict want;
  };
  const Row battery[] = {
      {"harmonic:1", Verdict::diverges_empirically},
      {"power:2,1.5", Verdict::diverges_empirically},
      {"power:1,2", Verdict::diverges_empirically},
      {"log:1,2", Verdict::diverges_empirically},
      {"power:1,3", Verdict::converges_empirically},
      {"power:1,2.5", Verdict::converges_empirically},
      {"power:2,3.5", Verdict::converges_empirically},
      {"power:1,4", Verdict::converges_empirically},
  };
  for (const Row& row : battery) {
    auto rep = divergence_verdict(SequenceSpec::parse(row.gen));
    CHECK(rep.sum_i_ai == row.want);
    CHECK(rep.sum_a_floor_sqrt == row.want);  // the equivalence, empirically
  }
}

TEST_CASE("named verdict examples") {
  CHECK(divergence_verdict(SequenceSpec::parse("harmonic:1")).sum_ai ==
        Verdict::diverges_empirically);
  CHECK(divergence_verdict(SequenceSpec::parse("power:1,3")).sum_ai ==
        Verdict::converges_empirically);
  // a_i = 1/(i ln^2 i): the plain series converges, the weighted one diverges
  auto rep = divergence_verdict(SequenceSpec::parse("log:1,2"));
  CHECK(rep.sum_ai == Verdict::converges_empirically);
  CHECK(rep.sum_i_ai == Verdict::diverges_empirically);
}

TEST_CASE("generators parse, print, and validate") {
  auto spec = SequenceSpec::parse("log:1,2");
  CHECK(spec(10.0) == doctest::Approx(1.0 / (10.0 * std::pow(std::log(10.0), 2))));
  CHECK(SequenceSpec::parse(spec.describe())(100.0) == doctest::Approx(spec(100.0)));

  auto expl = SequenceSpec::parse("explicit:0.5,0.25,0.25");
  CHECK(expl(1.0) == 0.5);
  CHECK(expl(2.0) == 0.25);
  CHECK(expl(17.0) == 0.25);  // last value repeats

  CHECK_THROWS_AS(SequenceSpec::parse("explicit:0.1,0.5"), BadParameterError);
  CHECK_THROWS_AS(SequenceSpec::parse("power:-1,2"), BadParameterError);
  CHECK_THROWS_AS(SequenceSpec::parse("wat:1"), BadParameterError);
  CHECK_THROWS_AS(partial_sums(SequenceSpec::parse("harmonic:1"), 2),
                  BadParameterError);
}

TEST_CASE("sequences used as targets stay positive and non-increasing") {
  for (const char* g : {"harmonic:1", "power:1,2", "log:1,2", "constant:10"}) {
    auto spec = SequenceSpec::parse(g);
    double prev = spec(1.0);
    CHECK(prev > 0);
    for (long n = 2; n <= 2000; ++n) {
      double a = spec(double(n));
      CHECK(a > 0);
      CHECK(a <= prev + 1e-15);
      prev = a;
    }
  }
}
