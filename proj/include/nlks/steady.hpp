// Radial steady aggregation profiles.
//
// The stationary density family carries total mass exactly 8*pi and comes in
// two equivalent parameterizations used in different places:
//   * density form      U(r)      = 32 L^2 / (4 + L^2 r^2)^2      (peak 2 L^2)
//   * unit-mass form    rho(r)    = (8 lam / M0) / (r^2 + lam)^2  (lam = 4/L^2)
// The cumulative fraction of the unit-mass form,
//   Mbar(r) = (8 pi / M0) * r^2 / (r^2 + lam),
// is the comparison threshold used by the spreading/concentration envelopes;
// it reaches total 8 pi / M0, so it is a genuine cumulative profile (sup 1)
// exactly when M0 = 8 pi.
#pragma once

namespace nlks {

struct SteadyFamily {
  double lambda;    // scale parameter; see note below for its units
  double M0;        // capacity used to normalize the unit-mass form
  bool normalized;  // true: unit-mass rho form; false: mass-8*pi density form

  // normalized=true  : lambda is the length^2 scale in (r^2 + lambda)^2
  // normalized=false : lambda is the peak parameter of 32 L^2/(4 + L^2 r^2)^2
  SteadyFamily(double lambda_, double M0_, bool normalized_);

  // density at radius r in the selected form
  double density(double r) const;

  // cumulative fraction Mbar(r) of the unit-mass form (uses the length^2
  // scale); tends to 8 pi / M0 as r -> infinity
  double cumulative(double r) const;
};

// conversion: peak parameter L of the density form -> length^2 scale 4/L^2
double peak_to_scale(double L);

}  // namespace nlks
