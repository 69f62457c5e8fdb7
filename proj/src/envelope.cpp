#include "nlks/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlks/errors.hpp"
#include "nlks/growth.hpp"

namespace nlks {

namespace {

// cumulative fraction of the unit-mass steady family at scale lam
double mbar(double M0, double lam, double r) {
  const double s = r * r;
  return (eight_pi / M0) * s / (s + lam);
}

void require(bool ok, const char* what) {
  if (!ok) throw validation_error(what);
}

}  // namespace

SuperEnvelope::SuperEnvelope(double M0_, double mu_, double lambda0_)
    : M0(M0_), mu(mu_), lambda0(lambda0_) {
  require(std::isfinite(M0) && M0 > 0.0, "SuperEnvelope: M0 must be finite and > 0");
  require(M0 < eight_pi && !near_eight_pi(M0),
          "SuperEnvelope: requires capacity M0 strictly below 8*pi");
  require(std::isfinite(mu) && mu > 0.0 && mu < 1.0,
          "SuperEnvelope: mu must lie in (0, 1)");
  require(mu * eight_pi / M0 > 1.0,
          "SuperEnvelope: mu * 8*pi / M0 must exceed 1 so the envelope reaches 1");
  require(std::isfinite(lambda0) && lambda0 > 0.0,
          "SuperEnvelope: lambda0 must be finite and > 0");
}

double SuperEnvelope::lambda_at(double t) const {
  require(std::isfinite(t) && t >= 0.0, "SuperEnvelope: t must be finite and >= 0");
  return lambda0 + (M0 / (mu * pi_v)) * (1.0 - mu) * (mu * eight_pi / M0 - 1.0) * t;
}

double SuperEnvelope::value(double t, double r) const {
  require(std::isfinite(r) && r >= 0.0, "SuperEnvelope: r must be finite and >= 0");
  return std::min(1.0, mu * mbar(M0, lambda_at(t), r));
}

double SuperEnvelope::cap_radius(double t) const {
  return std::sqrt(lambda_at(t) / (mu * eight_pi / M0 - 1.0));
}

SubEnvelope::SubEnvelope(double M0_, double mu0_, double mu1_, double lambda0_)
    : M0(M0_), mu0(mu0_), mu1(mu1_), lambda0(lambda0_) {
  require(std::isfinite(M0) && M0 > eight_pi && !near_eight_pi(M0),
          "SubEnvelope: requires capacity M0 strictly above 8*pi");
  require(std::isfinite(mu0) && std::isfinite(mu1) && 1.0 < mu0 && mu0 < mu1,
          "SubEnvelope: amplitudes must satisfy 1 < mu0 < mu1");
  require(mu1 * eight_pi / M0 < 1.0,
          "SubEnvelope: mu1 * 8*pi / M0 must stay below 1 so the envelope is a "
          "valid cumulative bound");
  require(std::isfinite(lambda0) && lambda0 > 0.0,
          "SubEnvelope: lambda0 must be finite and > 0");
}

double SubEnvelope::matching_radius_sq() const { return lambda0 / (mu1 / mu0 - 1.0); }

double SubEnvelope::shrink_rate() const {
  return -(8.0 * mu0 / (matching_radius_sq() * mu1)) * (mu0 - 1.0);
}

double SubEnvelope::lambda_at(double t) const {
  require(std::isfinite(t) && t >= 0.0, "SubEnvelope: t must be finite and >= 0");
  return lambda0 * std::exp(shrink_rate() * t);
}

double SubEnvelope::value(double t, double r) const {
  require(std::isfinite(r) && r >= 0.0, "SubEnvelope: r must be finite and >= 0");
  return std::max(mu1 * mbar(M0, lambda0, r), mu0 * mbar(M0, lambda_at(t), r));
}

double SubEnvelope::witness_radius(double t) const {
  require(std::isfinite(t) && t >= 0.0, "SubEnvelope: t must be finite and >= 0");
  return std::exp(shrink_rate() * t / 3.0);
}

double SubEnvelope::witness_onset_time() const {
  // envelope value at the witness radius is mu0 (8 pi/M0) / (1 + lambda0 e^{A t/3});
  // it exceeds 8 pi / M0 once e^{A t/3} < (mu0 - 1) / lambda0
  const double ratio = (mu0 - 1.0) / lambda0;
  if (ratio >= 1.0) return 0.0;
  return 3.0 * std::log(ratio) / shrink_rate();
}

}  // namespace nlks
