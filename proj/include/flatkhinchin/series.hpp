#pragma once

#include <vector>

#include "flatkhinchin/sequences.hpp"

namespace flatkhinchin {

/// Partial sums of the weighted series used by the divergence equivalences:
/// S1(K) = sum_{i<=K} i*a_i, S2(K) = sum_{i<=K} a_{floor(sqrt(i))}, and the
/// M=2 block bounds L_j = sum_{i=1..j} 4^(i-1) a_{2^i},
/// U_j = sum_{i=0..j} 4^(i+1) a_{2^i}.
struct PartialSums {
  double sum_i_ai = 0;
  double sum_a_floor_sqrt = 0;
  std::vector<double> sandwich_lower;   // L_j, j = 1..jmax
  std::vector<double> sandwich_upper;   // U_j, j = 0..jmax
  std::vector<double> sum_i_ai_at_pow2; // S1(2^j), j = 0..jmax
  long jmax = 0;
};

PartialSums partial_sums(const SequenceSpec& spec, long K);

enum class Verdict { diverges_empirically, converges_empirically, inconclusive };

const char* verdict_name(Verdict v);

struct VerdictThresholds {
  double ratio_diverge = 0.95;   // per-decade increment ratio at/above: diverges
  double ratio_converge = 0.90;  // at/below: converges
  double abs_floor = 1e-9;       // last increment below: converges
};

struct DivergenceReport {
  Verdict sum_ai;
  Verdict sum_i_ai;
  Verdict sum_a_floor_sqrt;
  // per-decade increments (K = 1e4 -> 1e5 -> 1e6), for the record
  double inc_ai[2];
  double inc_i_ai[2];
  double inc_sqrt[2];
};

/// Empirical growth classification across K in {1e4, 1e5, 1e6}. Numerics
/// cannot decide divergence; these are labeled verdicts, nothing more.
DivergenceReport divergence_verdict(const SequenceSpec& spec,
                                    VerdictThresholds th = {});

}  // namespace flatkhinchin
