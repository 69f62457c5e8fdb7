#include "nlks/steady.hpp"

#include <cmath>

#include "nlks/errors.hpp"
#include "nlks/growth.hpp"

namespace nlks {

SteadyFamily::SteadyFamily(double lambda_, double M0_, bool normalized_)
    : lambda(lambda_), M0(M0_), normalized(normalized_) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw validation_error("SteadyFamily: lambda must be finite and > 0");
  if (!std::isfinite(M0) || M0 <= 0.0)
    throw validation_error("SteadyFamily: M0 must be finite and > 0");
}

double peak_to_scale(double L) {
  if (!std::isfinite(L) || L <= 0.0)
    throw validation_error("peak_to_scale: peak parameter must be finite and > 0");
  return 4.0 / (L * L);
}

double SteadyFamily::density(double r) const {
  if (!std::isfinite(r) || r < 0.0)
    throw validation_error("SteadyFamily::density: r must be finite and >= 0");
  if (normalized) {
    const double d = r * r + lambda;
    return 8.0 * lambda / (M0 * d * d);
  }
  const double d = 4.0 + lambda * lambda * r * r;
  return 32.0 * lambda * lambda / (d * d);
}

double SteadyFamily::cumulative(double r) const {
  if (!std::isfinite(r) || r < 0.0)
    throw validation_error("SteadyFamily::cumulative: r must be finite and >= 0");
  const double scale = normalized ? lambda : peak_to_scale(lambda);
  const double s = r * r;
  return (eight_pi / M0) * s / (s + scale);
}

}  // namespace nlks
