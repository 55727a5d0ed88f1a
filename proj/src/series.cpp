#include "flatkhinchin/series.hpp"

#include <cmath>
#include <sstream>

namespace flatkhinchin {

SequenceSpec SequenceSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::vector<double> vals;
  if (!args.empty()) {
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  }
  SequenceSpec spec;
  auto arg = [&](std::size_t i, double fallback) {
    return i < vals.size() ? vals[i] : fallback;
  };
  if (kind == "constant") {
    spec.kind = Kind::constant;
    spec.c = arg(0, 1.0);
  } else if (kind == "harmonic") {
    spec.kind = Kind::harmonic;
    spec.c = arg(0, 1.0);
  } else if (kind == "power") {
    spec.kind = Kind::power;
    spec.c = arg(0, 1.0);
    spec.p = arg(1, 2.0);
  } else if (kind == "log") {
    spec.kind = Kind::log_power;
    spec.c = arg(0, 1.0);
    spec.q = arg(1, 1.0);
  } else if (kind == "explicit") {
    spec.kind = Kind::explicit_list;
    spec.values = vals;
  } else {
    throw BadParameterError("unknown sequence generator: " + kind);
  }
  spec.validate();
  return spec;
}

std::string SequenceSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::constant: os << "constant:" << c; break;
    case Kind::harmonic: os << "harmonic:" << c; break;
    case Kind::power: os << "power:" << c << "," << p; break;
    case Kind::log_power: os << "log:" << c << "," << q; break;
    case Kind::explicit_list: {
      os << "explicit:";
      for (std::size_t i = 0; i < values.size(); ++i)
        os << (i ? "," : "") << values[i];
      break;
    }
  }
  return os.str();
}

void SequenceSpec::validate() const {
  if (kind == Kind::explicit_list) {
    if (values.empty()) throw BadParameterError("explicit sequence is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0)) throw BadParameterError("sequence values must be positive");
      if (i > 0 && values[i] > values[i - 1])
        throw BadParameterError("sequence must be non-increasing");
    }
    return;
  }
  if (!(c > 0)) throw BadParameterError("sequence scale must be positive");
  if (kind == Kind::power && !(p > 0))
    throw BadParameterError("power exponent must be positive");
  if (kind == Kind::log_power && !(q > 0))
    throw BadParameterError("log exponent must be positive");
}

namespace {

struct Kahan {
  double sum = 0, carry = 0;
  void add(double v) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

long isqrt_floor(long n) {
  long r = static_cast<long>(std::sqrt(double(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

PartialSums partial_sums(const SequenceSpec& spec, long K) {
  if (K < 4) throw BadParameterError("K must be at least 4");
  spec.validate();
  PartialSums out;
  Kahan s1, s2;
  long jmax = 0;
  while ((2L << jmax) <= K) ++jmax;  // largest j with 2^j <= K
  out.jmax = jmax;
  out.sum_i_ai_at_pow2.resize(jmax + 1, 0);
  long next_pow = 1;
  int next_j = 0;
  for (long i = 1; i <= K; ++i) {
    double ai = spec(double(i));
    s1.add(double(i) * ai);
    s2.add(spec(double(isqrt_floor(i))));
    if (i == next_pow) {
      out.sum_i_ai_at_pow2[next_j] = s1.sum;
      ++next_j;
      next_pow <<= 1;
    }
  }
  out.sum_i_ai = s1.sum;
  out.sum_a_floor_sqrt = s2.sum;

  // block bounds with M = 2: L_j = sum_{i=1..j} 4^(i-1) a_{2^i},
  // U_j = sum_{i=0..j} 4^(i+1) a_{2^i}
  Kahan lo, hi;
  hi.add(4.0 * spec(1.0));
  out.sandwich_upper.push_back(hi.sum);
  for (long j = 1; j <= jmax; ++j) {
    double a2j = spec(std::exp2(double(j)));
    lo.add(std::exp2(2.0 * double(j - 1)) * a2j);
    hi.add(std::exp2(2.0 * double(j + 1)) * a2j);
    out.sandwich_lower.push_back(lo.sum);
    out.sandwich_upper.push_back(hi.sum);
  }
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::diverges_empirically: return "diverges_empirically";
    case Verdict::converges_empirically: return "converges_empirically";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

Verdict classify(double s4, double s5, double s6, const VerdictThresholds& th) {
  double inc1 = s5 - s4, inc2 = s6 - s5;
  if (inc2 < th.abs_floor * std::max(1.0, s6))
    return Verdict::converges_empirically;
  if (inc1 <= 0) return Verdict::inconclusive;
  double r = inc2 / inc1;
  if (r >= th.ratio_diverge) return Verdict::diverges_empirically;
  if (r <= th.ratio_converge) return Verdict::converges_empirically;
  return Verdict::inconclusive;
}

}  // namespace

DivergenceReport divergence_verdict(const SequenceSpec& spec, VerdictThresholds th) {
  spec.validate();
  const long K1 = 10000, K2 = 100000, K3 = 1000000;
  Kahan a, ia, sq;
  double a4 = 0, a5 = 0, ia4 = 0, ia5 = 0, sq4 = 0, sq5 = 0;
  for (long i = 1; i <= K3; ++i) {
    double ai = spec(double(i));
    a.add(ai);
    ia.add(double(i) * ai);
    sq.add(spec(double(isqrt_floor(i))));
    if (i == K1) {
      a4 = a.sum;
      ia4 = ia.sum;
      sq4 = sq.sum;
    } else if (i == K2) {
      a5 = a.sum;
      ia5 = ia.sum;
      sq5 = sq.sum;
    }
  }
  DivergenceReport rep{};
  rep.sum_ai = classify(a4, a5, a.sum, th);
  rep.sum_i_ai = classify(ia4, ia5, ia.sum, th);
  rep.sum_a_floor_sqrt = classify(sq4, sq5, sq.sum, th);
  rep.inc_ai[0] = a5 - a4;
  rep.inc_ai[1] = a.sum - a5;
  rep.inc_i_ai[0] = ia5 - ia4;
  rep.inc_i_ai[1] = ia.sum - ia5;
  rep.inc_sqrt[0] = sq5 - sq4;
  rep.inc_sqrt[1] = sq.sum - sq5;
  return rep;
}

}  // namespace flatkhinchin
