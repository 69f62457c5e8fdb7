// Closed-form laws of the spatially integrated mass for the aggregation
// model with nonlocal logistic growth, and the parameter-regime classifier.
//
// The total mass decouples from the spatial profile and obeys the logistic
// ODE dm/dt = m(M0 - m), so everything here is exact and serves as ground
// truth for the PDE solvers: mass, second moment, second-moment blow-up
// time, and the critical second-moment constant that separates guaranteed
// collapse from the open region of the parameter plane.
#pragma once

#include <optional>
#include <string>

namespace nlks {

inline constexpr double pi_v = 3.14159265358979323846264338327950288;
inline constexpr double eight_pi = 8.0 * pi_v;

// Comparisons of masses against the 8*pi aggregation threshold use a fixed
// relative band so that values intended to sit exactly on the threshold
// (e.g. 8*atan(1)*8 computed in different orders) classify consistently.
inline constexpr double eight_pi_rel_band = 1e-12;

// true iff v lies within the relative tolerance band around 8*pi
bool near_eight_pi(double v);

struct GrowthParams {
  double M0;  // carrying capacity of the logistic reaction
  double m0;  // total mass at t = 0

  // validates M0 > 0, m0 > 0, both finite
  GrowthParams(double M0_, double m0_);

  // constant in m(t) = M0 / (1 + cbar * exp(-M0 t))
  double cbar() const { return (M0 - m0) / m0; }
};

// m(t); monotone between m0 and M0, saturates to M0 for large t
double mass_at(const GrowthParams& p, double t);

// dm/dt evaluated at a given mass value: mass * (M0 - mass)
double mass_rate(const GrowthParams& p, double mass);

// Second moment of the full-plane solution: integral of |x|^2 u(x,t) dx,
// given its initial value m2_0.  Closed form:
//   m2(t) = m(t) * [ 4 t - ln(q(t))/(2 pi) + m2_0/m0 ],
//   q(t)  = (m0/M0) e^{M0 t} + (M0 - m0)/M0,
// evaluated in overflow-safe form.  May be negative: the first zero is the
// finite blow-up time.
double second_moment_at(const GrowthParams& p, double m2_0, double t);

// The drift-normalized moment h(t) = m2(t)/m(t).  Its sign determines
// blow-up: h' = 4 - m(t)/(2 pi), so h decreases exactly while m > 8 pi.
double second_moment_ratio_at(const GrowthParams& p, double m2_0, double t);

// First positive time where the second moment hits zero, i.e. the proof's
// upper bound on the maximal existence time.  Absent when the closed form
// stays positive for all t.  Root located by bracketing + bisection to an
// absolute tolerance of 1e-12.
std::optional<double> blowup_time(const GrowthParams& p, double m2_0);

// Critical initial second moment C(M0, m0), defined for M0 < 8 pi < m0
// (strictly outside the threshold band): initial second moments below it
// force finite-time collapse, above it the closed form stays positive.
double critical_second_moment(const GrowthParams& p);

// Time at which the mass crosses 8 pi (the extremum of h).  Zero when
// m0 sits on the threshold; absent when the mass never crosses (both
// endpoints on the same side, or capacity pinned at 8 pi).
std::optional<double> h_min_time(const GrowthParams& p);

enum class Regime {
  GlobalExistence,          // m0 < M0 < 8 pi
  GlobalByComparison,       // M0 <= m0 < 8 pi
  InfiniteTimeBlowup,       // m0 < M0 = 8 pi
  FiniteTimeBlowup,         // M0 > 8 pi
  ConditionalFiniteBlowup,  // M0 < 8 pi < m0 and m2_0 < C(M0, m0)
  OpenCritical,             // remaining threshold cases / undecided
};

const char* regime_name(Regime r);

struct Classification {
  Regime regime;
  std::string note;  // governing mechanism, human readable
};

// Regime of the parameter pair; m2_0, when provided, decides the
// conditional-collapse region M0 < 8 pi < m0.
Classification classify(const GrowthParams& p,
                        std::optional<double> m2_0 = std::nullopt);

}  // namespace nlks
