#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "flatkhinchin/circle_measure.hpp"
#include "flatkhinchin/cylinders.hpp"
#include "flatkhinchin/iet.hpp"
#include "flatkhinchin/sequences.hpp"

namespace flatkhinchin {

inline constexpr int kReportSchemaVersion = 1;

/// Shrinking-target flow experiment: sample (theta, x), probe the geometric
/// time grid plus the cylinder-predicted return times, record times t with
/// d(F^t x, x) < f(t).
struct KhinchinFlowConfig {
  std::string surface_name;  // echoed into the report
  SequenceSpec f = SequenceSpec::parse("harmonic:1");
  int samples = 100;
  double horizon = 1e4;
  std::uint64_t seed = 1;
  int threads = 1;
  double t0 = 1.0;
  double rho = 1.25;        // geometric grid ratio
  double cyl_length = 1280; // probe-time cylinder search bound
  double probe_slack = 4.0; // include probes with predicted miss < slack*f(t)
  int max_multiples = 16;   // probe k*T*sec as long as the bound can hold
};

nlohmann::json run_khinchin_flow(const TranslationSurface& s,
                                 const KhinchinFlowConfig& cfg);

struct IetRecurrenceConfig {
  std::string surface_name;
  SequenceSpec a = SequenceSpec::parse("harmonic:1");
  int samples = 100;
  long N = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  // transversal (defaults: full horizontal circle through the first polygon's
  // first vertex)
  SurfacePoint base{0, {0, 0}};
  double base_tau = 0;
  double length = 1;
  int max_redraws = 16;
};

nlohmann::json run_iet_khinchin(const TranslationSurface& s,
                                const IetRecurrenceConfig& cfg);

struct TranslationCheck {
  double fraction_close = 0;
  double threshold = 0;        // displacement cut used (10*eps)
  double mean_displacement = 0;
  double max_displacement = 0;
  int samples = 0;
};

/// Perturbed-direction return: flow each sampled cylinder point for time
/// T*|sec(2*pi*delta)| in direction tau+eps/T and measure how far it lands
/// from where it started.
TranslationCheck run_translation_check(const TranslationSurface& s,
                                       const Cylinder& c, double eps,
                                       int samples, std::uint64_t seed,
                                       double displacement_cut = -1);

struct SeparationViolation {
  double tau1, T1, h1, tau2, T2;
  double lhs, rhs;  // lhs = T2*|sin(2*pi*(tau1-tau2))|, rhs = h1
};

struct SeparationReport {
  long pairs_checked = 0;
  std::vector<SeparationViolation> violations;         // exact-constant form
  long unit_form_violations = 0;  // |tau1-tau2| >= 1/(T2*T1), reported only
};

/// Crossing-time separation: cylinders sharing a point satisfy
/// T2*|sin(2*pi*(tau1-tau2))| >= h1 (checked with 1e-9 relative slack).
SeparationReport verify_cylinder_separation(const TranslationSurface& s, double L,
                                            CylinderOptions opt = {});

nlohmann::json verify_covering_report(const TranslationSurface& s, double L,
                                      double constant /*<0: search*/);
nlohmann::json verify_sum_bound_report(const TranslationSurface& s, double L,
                                       int dyadic_max_k = 6);
nlohmann::json verify_key_report(const TranslationSurface& s, double N, double C1,
                                 double j0, double j1);
nlohmann::json separation_report_json(const SeparationReport& r);

/// Deterministic fan-out over sample indices; results must be written by
/// index so the report is identical for every worker count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

std::string dump_report(const nlohmann::json& j);

}  // namespace flatkhinchin
