#include "nlks/sgrid.hpp"

#include <cmath>
#include <string>

#include "nlks/errors.hpp"

namespace nlks {

SGrid SGrid::geometric(std::size_t n, double s_max, double stretch) {
  if (n < 8) {
    throw validation_error("grid needs at least 8 nodes, got " + std::to_string(n));
  }
  if (!(s_max > 0) || !std::isfinite(s_max)) {
    throw validation_error("grid extent s_max must be positive and finite");
  }
  if (!(stretch >= 1) || !std::isfinite(stretch)) {
    throw validation_error("grid stretch must be >= 1 (1 = uniform)");
  }
  SGrid g;
  g.s_max = s_max;
  g.stretch = stretch;
  g.s.resize(n);
  const double ratio = std::pow(stretch, 1.0 / static_cast<double>(n - 2));
  // Accumulate unit spacings h_k = ratio^k, then scale so the last node
  // lands on s_max exactly.
  g.s[0] = 0.0;
  double step = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    g.s[i] = g.s[i - 1] + step;
    step *= ratio;
  }
  const double scale = s_max / g.s[n - 1];
  for (std::size_t i = 1; i < n; ++i) g.s[i] *= scale;
  g.s[n - 1] = s_max;  // pin against roundoff in the scaling
  return g;
}

double SGrid::ratio() const {
  return std::pow(stretch, 1.0 / static_cast<double>(s.size() - 2));
}

}  // namespace nlks
