#include "flatkhinchin/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "flatkhinchin/rng.hpp"

namespace flatkhinchin {

using nlohmann::json;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int workers = std::min(threads, n);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::string dump_report(const json& j) { return j.dump(1); }

namespace {

SurfacePoint sample_point(const TranslationSurface& s, SplitMix64& rng) {
  // polygon by area, then rejection inside its bounding box
  std::vector<double> areas(s.num_polygons());
  double total = 0;
  for (int p = 0; p < s.num_polygons(); ++p) {
    const auto& poly = s.polygon(p);
    double a = 0;
    for (int i = 0; i < poly.n; ++i)
      a += cross(poly.v[i], poly.v[(i + 1) % poly.n]);
    areas[p] = 0.5 * a;
    total += areas[p];
  }
  for (int guard = 0; guard < 100000; ++guard) {
    double pick = rng.uniform() * total;
    int p = 0;
    while (p + 1 < s.num_polygons() && pick > areas[p]) {
      pick -= areas[p];
      ++p;
    }
    const auto& poly = s.polygon(p);
    Vec2 lo = poly.v[0], hi = poly.v[0];
    for (const Vec2& v : poly.v) {
      lo.x = std::min(lo.x, v.x);
      lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x);
      hi.y = std::max(hi.y, v.y);
    }
    Vec2 q{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    if (point_in_polygon(poly, q, -1e-9 * s.scale())) return {p, q};
  }
  throw Error("point sampling failed");
}

json point_json(const SurfacePoint& p) {
  return json::array({p.poly, p.pos.x, p.pos.y});
}

}  // namespace

json run_khinchin_flow(const TranslationSurface& s, const KhinchinFlowConfig& cfg) {
  cfg.f.validate();
  if (cfg.samples < 1 || cfg.horizon < 1)
    throw BadParameterError("need samples >= 1 and horizon >= 1");

  // short cylinders are shared by all samples; longer ones are searched per
  // sample in narrow sectors around the sampled direction, one annulus of
  // core lengths at a time
  const double base_length = std::min(cfg.cyl_length, 20.0);
  std::vector<Cylinder> base_cyls;
  bool have_cyls = true;
  try {
    base_cyls = cylinder_sequence(s, base_length);
  } catch (const NoCylindersError&) {
    have_cyls = false;  // grid-only probing still works
  }
  std::vector<std::pair<double, double>> annuli;  // [T_lo, T_hi)
  for (double lo = base_length; lo < cfg.cyl_length; lo *= 4.0)
    annuli.push_back({lo, std::min(4.0 * lo, cfg.cyl_length)});

  struct SampleOut {
    double theta = 0;
    SurfacePoint x;
    bool failed = false;
    std::vector<std::array<double, 3>> hits;  // t, distance, f(t)
    double first_hit_t = -1;
    double min_ratio = std::numeric_limits<double>::infinity();
    bool large_t_hit = false;
  };
  std::vector<SampleOut> results(cfg.samples);

  auto run_sample = [&](int i) {
    SampleOut& out = results[i];
    SplitMix64 tr = sample_stream(cfg.seed, "theta", i);
    out.theta = tr.uniform();
    SplitMix64 xr = sample_stream(cfg.seed, "point", i);
    out.x = sample_point(s, xr);

    std::vector<Cylinder> cyls = base_cyls;
    if (have_cyls) {
      for (auto [t_lo, t_hi] : annuli) {
        double hw = std::min(
            cfg.probe_slack * cfg.f(t_lo) / (kTwoPi * t_lo) + 1e-9, 0.02);
        try {
          auto extra =
              enumerate_cylinders_in_sector(s, t_hi, s.sigma(), out.theta, hw);
          for (auto& c : extra)
            if (c.core_length >= t_lo) cyls.push_back(c);
        } catch (const Error&) {
          // sector search failed; shorter cylinders still probe
        }
      }
    }

    // probe schedule: geometric grid plus cylinder-predicted return times
    std::vector<double> probes;
    for (double t = cfg.t0; t <= cfg.horizon; t *= cfg.rho) probes.push_back(t);
    probes.push_back(cfg.horizon);
    for (const Cylinder& c : cyls) {
      double T = c.core_length;
      for (double tau : {c.direction.tau, wrap_turn(c.direction.tau + 0.5)}) {
        double delta = out.theta - tau;
        delta -= std::round(delta);  // nearest representative in [-1/2, 1/2)
        double ang = kTwoPi * delta;
        double cosang = std::cos(ang);
        if (std::fabs(cosang) < 0.5) continue;  // too oblique to wrap
        double sec = 1.0 / std::fabs(cosang);
        double drift = T * sec * std::fabs(std::sin(ang));
        for (int k = 1; k <= cfg.max_multiples; ++k) {
          double t = k * T * sec;
          if (t > cfg.horizon) break;
          if (k * drift >= cfg.probe_slack * cfg.f(t)) break;
          probes.push_back(t);
        }
      }
    }
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end(),
                             [](double a, double b) { return b - a < 1e-12 * b; }),
                 probes.end());

    Direction dir(out.theta);
    SurfacePoint cur = out.x;
    double t_cur = 0;
    for (double t : probes) {
      if (t <= 0) continue;
      double bound = cfg.f(t);
      try {
        cur = flow_point(s, cur, dir, t - t_cur);
        t_cur = t;
      } catch (const SingularityHitError&) {
        out.failed = true;
        break;
      } catch (const StepLimitError&) {
        out.failed = true;
        break;
      }
      DistanceOptions dopt;
      dopt.r_max = std::min(bound * (1.0 + 1e-6), 2.0 * s.scale());
      auto d = distance(s, out.x, cur, dopt);
      if (d) {
        out.min_ratio = std::min(out.min_ratio, *d / bound);
        if (*d < bound) {
          out.hits.push_back({t, *d, bound});
          if (out.first_hit_t < 0) out.first_hit_t = t;
          if (t >= cfg.horizon / 10.0) out.large_t_hit = true;
        }
      }
    }
  };
  parallel_for(cfg.samples, cfg.threads, run_sample);

  json samples = json::array();
  int valid = 0, with_hit = 0, with_large = 0, failed = 0;
  std::vector<double> first_hits;
  for (int i = 0; i < cfg.samples; ++i) {
    const SampleOut& r = results[i];
    json hits = json::array();
    for (const auto& h : r.hits) hits.push_back(json::array({h[0], h[1], h[2]}));
    json rec{{"i", i},          {"theta", r.theta},
             {"x", point_json(r.x)}, {"failed", r.failed},
             {"hits", hits},    {"first_hit_t", r.first_hit_t},
             {"large_t_hit", r.large_t_hit}};
    rec["min_ratio"] = std::isfinite(r.min_ratio) ? json(r.min_ratio) : json();
    samples.push_back(rec);
    if (r.failed) {
      ++failed;
      continue;
    }
    ++valid;
    if (!r.hits.empty()) ++with_hit;
    if (r.large_t_hit) ++with_large;
    if (r.first_hit_t >= 0) first_hits.push_back(r.first_hit_t);
  }
  std::sort(first_hits.begin(), first_hits.end());
  json aggregate{
      {"valid", valid},
      {"failed", failed},
      {"hit_fraction", valid ? double(with_hit) / valid : 0.0},
      {"large_t_fraction", valid ? double(with_large) / valid : 0.0},
      {"median_first_hit_t",
       first_hits.empty() ? json() : json(first_hits[first_hits.size() / 2])},
  };
  return json{{"schema_version", kReportSchemaVersion},
              {"experiment", "khinchin_flow"},
              {"environment", {{"library", "flatkhinchin"}, {"version", "0.1.0"}}},
              {"config",
               {{"surface", cfg.surface_name},
                {"f", cfg.f.describe()},
                {"samples", cfg.samples},
                {"horizon", cfg.horizon},
                {"seed", cfg.seed},
                {"t0", cfg.t0},
                {"rho", cfg.rho},
                {"cyl_length", cfg.cyl_length},
                {"probe_slack", cfg.probe_slack},
                {"max_multiples", cfg.max_multiples}}},
              {"samples", samples},
              {"aggregate", aggregate}};
}

json run_iet_khinchin(const TranslationSurface& s, const IetRecurrenceConfig& cfg) {
  cfg.a.validate();
  if (cfg.samples < 1 || cfg.N < 1)
    throw BadParameterError("need samples >= 1 and N >= 1");
  Transversal t(s, cfg.base, Direction(cfg.base_tau), cfg.length);

  struct SampleOut {
    double tau = 0;
    double x = 0;
    long hit_count = 0;
    long first_hit = -1;
    double min_ratio = 0;
    double tail_min_ratio = 0;
    int redraws = 0;
    bool failed = false;
  };
  std::vector<SampleOut> results(cfg.samples);

  auto run_sample = [&](int i) {
    SampleOut& out = results[i];
    for (int attempt = 0; attempt <= cfg.max_redraws; ++attempt) {
      SplitMix64 rng = sample_stream(cfg.seed, "iet", i, attempt);
      double tau = rng.uniform();
      double x = rng.uniform() * t.length();
      try {
        Iet iet = first_return_iet(s, Direction(tau), t);
        RecurrenceScan scan = recurrence_scan(iet, x, cfg.a, cfg.N);
        out.tau = tau;
        out.x = x;
        out.hit_count = static_cast<long>(scan.hits.size());
        out.first_hit = scan.first_hit;
        out.min_ratio = scan.min_ratio;
        out.tail_min_ratio = scan.tail_min_ratio;
        out.redraws = attempt;
        return;
      } catch (const Error&) {
        // near-periodic direction, breakpoint orbit, or no return: redraw
      }
    }
    out.failed = true;
    out.redraws = cfg.max_redraws;
  };
  parallel_for(cfg.samples, cfg.threads, run_sample);

  json samples = json::array();
  std::vector<long> hit_counts;
  int valid = 0, min_lt_1 = 0, failed = 0, redraw_total = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    const SampleOut& r = results[i];
    samples.push_back(json{{"i", i},
                           {"tau", r.tau},
                           {"x", r.x},
                           {"hits", r.hit_count},
                           {"first_hit", r.first_hit},
                           {"min_ratio", r.min_ratio},
                           {"tail_min_ratio", r.tail_min_ratio},
                           {"redraws", r.redraws},
                           {"failed", r.failed}});
    redraw_total += r.redraws;
    if (r.failed) {
      ++failed;
      continue;
    }
    ++valid;
    hit_counts.push_back(r.hit_count);
    if (r.min_ratio < 1.0) ++min_lt_1;
  }
  std::sort(hit_counts.begin(), hit_counts.end());
  json aggregate{
      {"valid", valid},
      {"failed", failed},
      {"redraws", redraw_total},
      {"median_hits", hit_counts.empty() ? json() : json(hit_counts[hit_counts.size() / 2])},
      {"fraction_min_ratio_lt_1", valid ? double(min_lt_1) / valid : 0.0},
  };
  return json{{"schema_version", kReportSchemaVersion},
              {"experiment", "iet_recurrence"},
              {"environment", {{"library", "flatkhinchin"}, {"version", "0.1.0"}}},
              {"config",
               {{"surface", cfg.surface_name},
                {"a", cfg.a.describe()},
                {"samples", cfg.samples},
                {"N", cfg.N},
                {"seed", cfg.seed},
                {"base", point_json(cfg.base)},
                {"base_tau", cfg.base_tau},
                {"length", cfg.length},
                {"max_redraws", cfg.max_redraws}}},
              {"samples", samples},
              {"aggregate", aggregate}};
}

TranslationCheck run_translation_check(const TranslationSurface& s,
                                       const Cylinder& c, double eps, int samples,
                                       std::uint64_t seed, double displacement_cut) {
  double T = c.core_length;
  if (eps / T >= 0.25)
    throw BadPerturbationError("perturbation eps/T is a quarter turn or more");
  if (!(eps < 0.5 * c.height))
    throw BadPerturbationError("perturbation eps must be below half the height");
  if (displacement_cut <= 0) displacement_cut = 10.0 * eps;

  double delta_turn = eps / T;
  Direction phi(c.tau_aligned + delta_turn);
  double sec = 1.0 / std::fabs(std::cos(kTwoPi * delta_turn));
  double t_flow = T * sec;

  TranslationCheck out;
  out.samples = samples;
  out.threshold = displacement_cut;
  int close = 0;
  double sum_d = 0, max_d = 0;
  int measured = 0;
  SplitMix64 rng = sample_stream(seed, "translation", 0);
  for (int i = 0; i < samples; ++i) {
    double along = rng.uniform() * T;
    double across = (rng.uniform() - 0.5) * c.height * (1.0 - 1e-9);
    try {
      SurfacePoint x = cylinder_point(s, c, along, across);
      SurfacePoint y = flow_point(s, x, phi, t_flow);
      DistanceOptions dopt;
      dopt.r_max = std::max(2.0 * displacement_cut, 8.0 * eps);
      auto d = distance(s, x, y, dopt);
      if (d) {
        ++measured;
        sum_d += *d;
        max_d = std::max(max_d, *d);
        if (*d < displacement_cut) ++close;
      }
    } catch (const SingularityHitError&) {
      // orbit left through a cone point: counts as not close
    }
  }
  out.fraction_close = samples ? double(close) / samples : 0.0;
  out.mean_displacement = measured ? sum_d / measured : 0.0;
  out.max_displacement = max_d;
  return out;
}

SeparationReport verify_cylinder_separation(const TranslationSurface& s, double L,
                                            CylinderOptions opt) {
  auto cyls = enumerate_cylinders(s, L, 0.05, opt);
  SeparationReport rep;
  double sigma = s.sigma();
  for (const Cylinder& c1 : cyls) {
    if (c1.area_fraction < sigma * (1.0 - 1e-9)) continue;
    CylinderMembership member(s, c1);
    for (const Cylinder& c2 : cyls) {
      double dtau = std::fabs(c1.direction.tau - c2.direction.tau);
      dtau = std::min(dtau, 0.5 - dtau);  // unoriented line angle in [0, 1/4]
      if (dtau < 1e-12) continue;         // same direction (or same cylinder)
      if (!member.contains(c2.witness)) continue;
      ++rep.pairs_checked;
      double lhs = c2.core_length * std::fabs(std::sin(kTwoPi * dtau));
      double rhs = c1.height;
      if (lhs < rhs * (1.0 - 1e-9))
        rep.violations.push_back({c1.direction.tau, c1.core_length, c1.height,
                                  c2.direction.tau, c2.core_length, lhs, rhs});
      if (dtau < 1.0 / (c1.core_length * c2.core_length) * (1.0 - 1e-12))
        ++rep.unit_form_violations;
    }
  }
  return rep;
}

json separation_report_json(const SeparationReport& r) {
  json v = json::array();
  for (const auto& x : r.violations)
    v.push_back(json{{"tau1", x.tau1},
                     {"T1", x.T1},
                     {"h1", x.h1},
                     {"tau2", x.tau2},
                     {"T2", x.T2},
                     {"lhs", x.lhs},
                     {"rhs", x.rhs}});
  return json{{"pairs_checked", r.pairs_checked},
              {"violations", v},
              {"pass", r.violations.empty()},
              {"unit_form_violations", r.unit_form_violations}};
}

json verify_covering_report(const TranslationSurface& s, double L, double constant) {
  json out{{"L", L}};
  if (constant > 0) {
    auto cyls = cylinder_sequence(s, L);
    if (cyls.empty()) throw NoCylindersError("no cylinders below the length bound");
    auto arcs =
        direction_arcs(cyls, [&](double T) { return constant / (T * L); });
    auto cover = covers_circle(arcs);
    out["constant"] = constant;
    out["covers"] = cover.covers;
    out["largest_gap"] = {{"center", cover.gap_center}, {"length", cover.gap_length}};
    out["cylinders"] = cyls.size();
    out["pass"] = cover.covers;
    return out;
  }
  auto found = minimal_covering_constant(s, L);
  out["c_emp"] = found.c_emp;
  out["cylinders"] = found.cylinders;
  auto formula = covering_constant_formula(s);
  out["formula_constant_log2"] = formula.log2_value;
  if (formula.value) out["formula_constant"] = *formula.value;
  out["pass"] = !formula.value || found.c_emp <= *formula.value;
  return out;
}

json verify_sum_bound_report(const TranslationSurface& s, double L, int dyadic_max_k) {
  auto cyls = cylinder_sequence(s, L);
  auto arcs = direction_arcs(cyls, [&](double T) { return 1.0 / (T * L); });
  double sigma_inv = 1.0 / s.sigma();
  double worst = 0;
  bool pass = true;
  for (int k = 0; k <= dyadic_max_k; ++k) {
    double lj = std::exp2(double(-k));
    for (int m = 0; m < (1 << k); ++m) {
      double j0 = m * lj, j1 = (m + 1) * lj;
      double measured = union_measure(arcs, j0, j1);
      if (measured > sigma_inv * lj) pass = false;
      worst = std::max(worst, measured / lj);
    }
  }
  // multiplicity diagnostic: deepest overlap of the arcs (the proof bounds it
  // by sigma^{-1})
  std::vector<std::pair<double, int>> events;
  for (const Arc& a : arcs) {
    double lo = wrap_turn(a.center) - a.radius, hi = wrap_turn(a.center) + a.radius;
    if (lo < 0) {
      events.push_back({lo + 1, +1});
      events.push_back({1.0, -1});
      events.push_back({0.0, +1});
      events.push_back({hi, -1});
    } else if (hi > 1) {
      events.push_back({lo, +1});
      events.push_back({1.0, -1});
      events.push_back({0.0, +1});
      events.push_back({hi - 1, -1});
    } else {
      events.push_back({lo, +1});
      events.push_back({hi, -1});
    }
  }
  std::sort(events.begin(), events.end());
  int depth = 0, max_depth = 0;
  for (auto [pos, d] : events) {
    depth += d;
    max_depth = std::max(max_depth, depth);
  }
  return json{{"L", L},
              {"dyadic_max_k", dyadic_max_k},
              {"cylinders", cyls.size()},
              {"sigma_inv", sigma_inv},
              {"max_ratio", worst},
              {"max_multiplicity", max_depth},
              {"pass", pass}};
}

json verify_key_report(const TranslationSurface& s, double N, double C1, double j0,
                       double j1) {
  auto rep = key_bound_report(s, N, j0, j1, C1);
  json out{{"N", N},
           {"C1", C1},
           {"J", json::array({j0, j1})},
           {"lambda_J", rep.lambda_j},
           {"measured", rep.measured},
           {"correction", rep.correction},
           {"annulus_count", rep.annulus_count},
           {"pass", rep.lambda_j == 0 ? rep.measured == 0 : rep.measured > 0}};
  if (rep.c2_candidate) out["C2_candidate"] = *rep.c2_candidate;
  return out;
}

}  // namespace flatkhinchin
