#include <cmath>

#include "doctest.h"

#include <nlohmann/json.hpp>

#include "flatkhinchin/experiments.hpp"
#include "flatkhinchin/io.hpp"

using namespace flatkhinchin;
using nlohmann::json;

namespace {

KhinchinFlowConfig small_flow_config(const char* f = "harmonic:1") {
  KhinchinFlowConfig cfg;
  cfg.surface_name = "square_torus";
  cfg.f = SequenceSpec::parse(f);
  cfg.samples = 16;
  cfg.horizon = 1000;
  cfg.cyl_length = 80;
  cfg.seed = 4242;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("a constant target above the diameter always hits") {
  auto s = builtin_surface("square_torus");
  auto cfg = small_flow_config("constant:10");
  cfg.horizon = 10;
  cfg.cyl_length = 10;
  auto rep = run_khinchin_flow(s, cfg);
  CHECK(rep["aggregate"]["hit_fraction"].get<double>() == 1.0);
}

TEST_CASE("hit fractions grow with the horizon") {
  auto s = builtin_surface("square_torus");
  double prev = -1;
  for (double horizon : {100.0, 1000.0, 10000.0}) {
    auto cfg = small_flow_config();
    cfg.horizon = horizon;
    auto rep = run_khinchin_flow(s, cfg);
    double frac = rep["aggregate"]["hit_fraction"].get<double>();
    CHECK(frac >= prev);
    prev = frac;
  }
  CHECK(prev >= 0.9);
}

TEST_CASE("convergent targets hit strictly less than divergent ones") {
  auto s = builtin_surface("square_torus");
  auto div = run_khinchin_flow(s, small_flow_config("harmonic:1"));
  auto conv = run_khinchin_flow(s, small_flow_config("power:1,2"));
  long hits_div = 0, hits_conv = 0;
  for (const auto& smp : div["samples"]) hits_div += smp["hits"].size();
  for (const auto& smp : conv["samples"]) hits_conv += smp["hits"].size();
  CHECK(hits_conv < hits_div);
}

TEST_CASE("pointwise-larger targets keep every hit") {
  auto s = builtin_surface("square_torus");
  auto one = run_khinchin_flow(s, small_flow_config("harmonic:1"));
  auto two = run_khinchin_flow(s, small_flow_config("harmonic:2"));
  CHECK(two["aggregate"]["hit_fraction"].get<double>() >=
        one["aggregate"]["hit_fraction"].get<double>());
  for (std::size_t i = 0; i < one["samples"].size(); ++i)
    CHECK(two["samples"][i]["hits"].size() >= one["samples"][i]["hits"].size());
}

TEST_CASE("reports are byte-identical across worker counts") {
  auto s = builtin_surface("L(2,2)");
  auto cfg = small_flow_config();
  cfg.surface_name = "L(2,2)";
  cfg.samples = 8;
  cfg.threads = 1;
  auto a = dump_report(run_khinchin_flow(s, cfg));
  cfg.threads = 4;
  auto b = dump_report(run_khinchin_flow(s, cfg));
  CHECK(a == b);
}

TEST_CASE("sampled-direction recurrence scans on the torus") {
  auto s = builtin_surface("square_torus");
  IetRecurrenceConfig cfg;
  cfg.surface_name = "square_torus";
  cfg.samples = 24;
  cfg.N = 10000;
  cfg.seed = 31415;
  cfg.threads = 2;
  auto rep = run_iet_khinchin(s, cfg);
  CHECK(rep["aggregate"]["failed"].get<int>() == 0);
  CHECK(rep["aggregate"]["fraction_min_ratio_lt_1"].get<double>() >= 0.95);
  CHECK(rep["aggregate"]["median_hits"].get<long>() >= 5);
  // determinism across worker counts
  cfg.threads = 1;
  CHECK(dump_report(run_iet_khinchin(s, cfg)) ==
        dump_report([&] {
          auto c2 = cfg;
          c2.threads = 3;
          return run_iet_khinchin(s, c2);
        }()));
}

TEST_CASE("larger targets can only gain hits") {
  auto s = builtin_surface("square_torus");
  IetRecurrenceConfig cfg;
  cfg.surface_name = "square_torus";
  cfg.samples = 12;
  cfg.N = 20000;
  cfg.seed = 999;
  auto one = run_iet_khinchin(s, cfg);
  cfg.a = SequenceSpec::parse("harmonic:2");
  auto two = run_iet_khinchin(s, cfg);
  for (int i = 0; i < cfg.samples; ++i) {
    long h1 = one["samples"][i]["hits"].get<long>();
    long h2 = two["samples"][i]["hits"].get<long>();
    bool same_sample = one["samples"][i]["tau"] == two["samples"][i]["tau"];
    if (same_sample) CHECK(h2 >= h1);
  }
}

TEST_CASE("convergent target sequences rarely hit the exchange scan") {
  auto s = builtin_surface("square_torus");
  IetRecurrenceConfig cfg;
  cfg.surface_name = "square_torus";
  cfg.samples = 12;
  cfg.N = 20000;
  cfg.seed = 999;
  auto div = run_iet_khinchin(s, cfg);
  cfg.a = SequenceSpec::parse("power:1,2");
  auto conv = run_iet_khinchin(s, cfg);
  long total_div = 0, total_conv = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    total_div += div["samples"][i]["hits"].get<long>();
    total_conv += conv["samples"][i]["hits"].get<long>();
  }
  CHECK(total_conv < total_div);
}

TEST_CASE("perturbed-direction returns stay close on the torus") {
  auto s = builtin_surface("square_torus");
  auto cyls = cylinder_sequence(s, 2.0);
  REQUIRE(!cyls.empty());
  auto chk = run_translation_check(s, cyls.front(), 0.01, 2000, 7);
  CHECK(chk.fraction_close == doctest::Approx(1.0).epsilon(0.01));
  // displacement is Theta(eps): about 2*pi*eps here, well under the cut
  CHECK(chk.max_displacement < 10 * 0.01);
  CHECK(chk.mean_displacement > 0.01);

  CHECK_THROWS_AS(run_translation_check(s, cyls.front(), 0.6, 10, 7),
                  BadPerturbationError);
}

TEST_CASE("separation bound holds on short enumerations") {
  for (const char* name : {"square_torus", "L(2,2)"}) {
    auto rep = verify_cylinder_separation(builtin_surface(name), 8.0);
    CHECK(rep.pairs_checked > 0);
    CHECK(rep.violations.empty());
  }
}

TEST_CASE("verifier reports carry pass flags") {
  auto s = builtin_surface("square_torus");
  auto sum = verify_sum_bound_report(s, 5.0, 4);
  CHECK(sum["pass"].get<bool>());
  CHECK(sum["max_multiplicity"].get<int>() >= 1);
  auto key = verify_key_report(s, 5.0, 2.0, 0.0, 1.0);
  CHECK(key["pass"].get<bool>());
  auto cover = verify_covering_report(s, 10.0, -1.0);
  CHECK(cover["pass"].get<bool>());
  CHECK(cover["c_emp"].get<double>() <= 2.0);
}
