// Time-dependent comparison envelopes for the radial cumulative mass.
//
// Both are built from the steady cumulative family Mbar_lam(r) =
// (8 pi / M0) r^2/(r^2 + lam) with a moving scale lam(t):
//
//  * SuperEnvelope (capacity below 8 pi): a supersolution
//        min(1, mu * Mbar_{lam(t)}(r)),   lam growing linearly in t.
//    Cumulative data starting below it stays below it, which forces local
//    mass near the origin to vanish.
//
//  * SubEnvelope (capacity above 8 pi): a subsolution
//        max(mu1 * Mbar_{lam0}(r), mu0 * Mbar_{lam(t)}(r)),
//    lam shrinking exponentially.  Cumulative data starting above the static
//    branch stays above the whole envelope, which forces more than the
//    fraction 8 pi / M0 of the mass into a radius shrinking like e^{A t / 2}.
//
// Parameter constraints are validated eagerly at construction.
#pragma once

namespace nlks {

struct SuperEnvelope {
  double M0;       // capacity, must be < 8 pi
  double mu;       // amplitude in (0, 1) with mu * 8 pi / M0 > 1
  double lambda0;  // initial scale, > 0

  SuperEnvelope(double M0_, double mu_, double lambda0_);

  // lam(t) = lambda0 + (M0 / (mu pi)) (1 - mu) (mu 8 pi / M0 - 1) t
  double lambda_at(double t) const;

  // envelope value min(1, mu * Mbar_{lam(t)}(r))
  double value(double t, double r) const;

  // radius at which the cap at 1 is reached: r^2 = lam(t) / (mu 8 pi/M0 - 1)
  double cap_radius(double t) const;
};

struct SubEnvelope {
  double M0;       // capacity, must be > 8 pi
  double mu0;      // inner amplitude, 1 < mu0 < mu1
  double mu1;      // outer amplitude, with mu1 * 8 pi / M0 < 1
  double lambda0;  // initial scale, > 0

  SubEnvelope(double M0_, double mu0_, double mu1_, double lambda0_);

  // matching radius of the two branches' asymptotics:
  // R0^2 = lambda0 / (mu1/mu0 - 1)
  double matching_radius_sq() const;

  // exponential shrink rate A = -(8 mu0 / (R0^2 mu1)) (mu0 - 1) < 0
  double shrink_rate() const;

  // lam(t) = lambda0 * exp(A t)
  double lambda_at(double t) const;

  // envelope value max(mu1 * Mbar_{lambda0}(r), mu0 * Mbar_{lam(t)}(r))
  double value(double t, double r) const;

  // witness radius e^{A t / 3}; for t past witness_onset_time the envelope
  // value at this radius exceeds 8 pi / M0, exhibiting concentration
  double witness_radius(double t) const;
  double witness_onset_time() const;
};

}  // namespace nlks
