// One-dimensional grid in the squared-radius coordinate s = r^2.
//
// Nodes run from s[0] = 0 to s[n-1] = s_max with geometrically growing
// spacing: h_{i+1} = g * h_i, where the common ratio g is derived from
// `stretch`, the ratio of the coarsest to the finest spacing.  stretch = 1
// recovers a uniform grid.  In s-coordinates the annulus between two nodes
// has plane area exactly pi * (s_{i+1} - s_i), which keeps all quadratures
// exact for piecewise profiles.
#pragma once

#include <cstddef>
#include <vector>

namespace nlks {

struct SGrid {
  std::vector<double> s;  // nodes, ascending, s.front() = 0, s.back() = s_max
  double s_max = 0;
  double stretch = 1;

  static SGrid geometric(std::size_t n, double s_max, double stretch);

  std::size_t n() const { return s.size(); }
  double h(std::size_t i) const { return s[i + 1] - s[i]; }  // spacing of cell i
  // common spacing ratio stretch^(1/(n-2))
  double ratio() const;
};

}  // namespace nlks
