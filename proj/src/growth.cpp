#include "nlks/growth.hpp"

#include <cmath>
#include <sstream>

#include "nlks/errors.hpp"

namespace nlks {

namespace {

void require_finite_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    std::ostringstream os;
    os << name << " must be finite and > 0, got " << v;
    throw validation_error(os.str());
  }
}

}  // namespace

bool near_eight_pi(double v) {
  return std::abs(v - eight_pi) <= eight_pi_rel_band * eight_pi;
}

GrowthParams::GrowthParams(double M0_, double m0_) : M0(M0_), m0(m0_) {
  require_finite_positive(M0, "M0");
  require_finite_positive(m0, "m0");
}

double mass_at(const GrowthParams& p, double t) {
  if (!std::isfinite(t) || t < 0.0)
    throw validation_error("mass_at: t must be finite and >= 0");
  // denominator 1 + cbar e^{-M0 t} decreases/increases monotonically toward 1
  // and stays positive for all t >= 0 since cbar > -1
  return p.M0 / (1.0 + p.cbar() * std::exp(-p.M0 * t));
}

double mass_rate(const GrowthParams& p, double mass) {
  if (!std::isfinite(mass)) throw validation_error("mass_rate: mass must be finite");
  return mass * (p.M0 - mass);
}

double second_moment_ratio_at(const GrowthParams& p, double m2_0, double t) {
  require_finite_positive(m2_0, "m2_0");
  if (!std::isfinite(t) || t < 0.0)
    throw validation_error("second_moment_ratio_at: t must be finite and >= 0");
  // ln q(t) with q = (m0/M0) e^{M0 t} + (M0-m0)/M0, factored so the
  // exponential never overflows: ln q = M0 t + ln(m0/M0 + (M0-m0)/M0 e^{-M0 t})
  const double ln_q =
      p.M0 * t + std::log(p.m0 / p.M0 + (p.M0 - p.m0) / p.M0 * std::exp(-p.M0 * t));
  return 4.0 * t - ln_q / (2.0 * pi_v) + m2_0 / p.m0;
}

double second_moment_at(const GrowthParams& p, double m2_0, double t) {
  return mass_at(p, t) * second_moment_ratio_at(p, m2_0, t);
}

std::optional<double> h_min_time(const GrowthParams& p) {
  if (near_eight_pi(p.m0)) return 0.0;
  if (near_eight_pi(p.M0)) return std::nullopt;  // approached asymptotically only
  const bool m0_above = p.m0 > eight_pi;
  const bool M0_above = p.M0 > eight_pi;
  if (m0_above == M0_above) return std::nullopt;  // mass stays on one side
  // solve m(t) = 8 pi:  e^{-M0 t} = (M0 - 8 pi) m0 / (8 pi (M0 - m0))
  const double ratio = (p.M0 - eight_pi) * p.m0 / (eight_pi * (p.M0 - p.m0));
  return -std::log(ratio) / p.M0;
}

std::optional<double> blowup_time(const GrowthParams& p, double m2_0) {
  require_finite_positive(m2_0, "m2_0");
  const auto h = [&](double t) { return second_moment_ratio_at(p, m2_0, t); };

  // Existence first, so the bracket search always terminates.
  double t_hi = -1.0;
  if (p.M0 > eight_pi && !near_eight_pi(p.M0)) {
    // h' -> 4 - M0/(2 pi) < 0: h eventually decreases at a fixed rate.
    t_hi = 1.0;
    while (h(t_hi) > 0.0) {
      t_hi *= 2.0;
      if (!std::isfinite(t_hi)) return std::nullopt;  // unreachable for valid input
    }
  } else if (near_eight_pi(p.M0)) {
    if (p.m0 <= eight_pi) return std::nullopt;  // h nondecreasing from h(0) > 0
    // h decreases toward the finite limit m2_0/m0 - ln(m0/8pi)/(2 pi)
    const double h_inf = m2_0 / p.m0 - std::log(p.m0 / eight_pi) / (2.0 * pi_v);
    if (h_inf >= 0.0) return std::nullopt;
    t_hi = 1.0;
    while (h(t_hi) > 0.0) t_hi *= 2.0;
  } else {
    // M0 < 8 pi: h has a single minimum where the mass crosses 8 pi (if it
    // does) and increases afterwards.
    const auto tc = h_min_time(p);
    if (!tc) return std::nullopt;  // mass never exceeds 8 pi: h nondecreasing
    if (h(*tc) > 0.0) return std::nullopt;
    t_hi = *tc;
    if (h(t_hi) == 0.0) return t_hi;
  }

  double t_lo = 0.0;  // h(0) = m2_0/m0 > 0
  while (t_hi - t_lo > 1e-12) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;  // interval at floating resolution
    (h(mid) > 0.0 ? t_lo : t_hi) = mid;
  }
  return 0.5 * (t_lo + t_hi);
}

double critical_second_moment(const GrowthParams& p) {
  if (near_eight_pi(p.M0) || near_eight_pi(p.m0) || p.M0 >= eight_pi || p.m0 <= eight_pi)
    throw validation_error(
        "critical_second_moment requires M0 < 8*pi < m0 strictly outside the threshold band");
  return -((eight_pi - p.M0) * p.m0 / (2.0 * p.M0 * pi_v)) *
             std::log((p.m0 - p.M0) / (eight_pi - p.M0)) +
         (4.0 * p.m0 / p.M0) * std::log(p.m0 / eight_pi);
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::GlobalExistence: return "GlobalExistence";
    case Regime::GlobalByComparison: return "GlobalByComparison";
    case Regime::InfiniteTimeBlowup: return "InfiniteTimeBlowup";
    case Regime::FiniteTimeBlowup: return "FiniteTimeBlowup";
    case Regime::ConditionalFiniteBlowup: return "ConditionalFiniteBlowup";
    case Regime::OpenCritical: return "OpenCritical";
  }
  return "?";
}

Classification classify(const GrowthParams& p, std::optional<double> m2_0) {
  const bool M0_at = near_eight_pi(p.M0);
  const bool m0_at = near_eight_pi(p.m0);

  if (!M0_at && p.M0 > eight_pi)
    return {Regime::FiniteTimeBlowup,
            "capacity above 8*pi keeps the drift supercritical for all time; the "
            "second moment reaches zero in finite time for every initial mass"};

  if (M0_at) {
    if (m0_at)
      return {Regime::OpenCritical,
              "capacity and initial mass both sit on the 8*pi threshold; the "
              "known bounds decide neither spreading nor collapse"};
    if (p.m0 < eight_pi)
      return {Regime::InfiniteTimeBlowup,
              "mass climbs to exactly 8*pi; the density concentrates into a "
              "point mass, but only as t -> infinity"};
    return {Regime::OpenCritical,
            "mass decays onto the 8*pi threshold from above; collapse and "
            "global spreading are both consistent with the known bounds"};
  }

  // M0 < 8 pi from here on
  if (m0_at)
    return {Regime::OpenCritical,
            "initial mass sits on the 8*pi threshold while the capacity is "
            "subcritical; the comparison argument degenerates and the outcome "
            "is not determined by (M0, m0) alone"};
  if (p.m0 > eight_pi) {
    if (m2_0) {
      const double crit = critical_second_moment(p);
      if (*m2_0 < crit)
        return {Regime::ConditionalFiniteBlowup,
                "mass starts supercritical and decays below 8*pi, but the "
                "initial second moment is small enough that the moment "
                "reaches zero before the drift turns subcritical"};
      return {Regime::OpenCritical,
              "mass starts supercritical but the initial second moment "
              "exceeds the critical constant; the moment bound stays "
              "positive and the outcome is undecided"};
    }
    return {Regime::OpenCritical,
            "mass starts above 8*pi and decays below it; collapse depends on "
            "the initial second moment (none was provided)"};
  }
  // m0 <= 8 pi and M0 < 8 pi
  if (p.m0 < p.M0)
    return {Regime::GlobalExistence,
            "mass rises toward a subcritical capacity; the free-energy bound "
            "controls the entropy and gives a global weak solution"};
  return {Regime::GlobalByComparison,
          p.m0 == p.M0
              ? "mass is constant below the 8*pi threshold (the logistic term "
                "vanishes); classical subcritical theory applies"
              : "mass decays toward the capacity, so the solution is dominated "
                "by a subcritical problem and exists globally"};
}

}  // namespace nlks
