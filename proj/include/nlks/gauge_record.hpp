// Per-observation diagnostic record shared by both solvers, plus the
// thresholds used by the concentration / vanishing / blow-up detectors.
#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace nlks {

struct GaugeRecord {
  double t = 0;
  double mass = 0;              // total physical mass m(t)
  double m2 = 0;                // physical second moment about the origin
  double entropy = 0;           // integral of u log u
  double interaction = 0;       // integral of u * c  (c the induced potential)
  double free_energy = 0;       // entropy/mass - interaction/(2 mass) - log(mass)
  double free_energy_rho = 0;   // same quantity computed from the unit-mass profile
  double dissipation = 0;       // integral of (u/m) |grad log u - grad c|^2
  double max_density = 0;       // peak physical density
  double half_mass_radius = 0;  // radius enclosing half of the mass
  double boundary_current = 0;  // mass flux magnitude near the outer wall (2D)
  bool concentration_flag = false;  // large mass fraction packed inside a small radius
  bool vanishing_flag = false;      // inner region nearly empty
};

struct GaugeThresholds {
  // detect_concentration threshold: mass fraction that must be enclosed.
  // NaN means "pick 8*pi/M0 at run time".
  double concentration_fraction = std::nan("");
  // the flag raises when that fraction fits inside this radius
  double concentration_radius = 0.25;
  double vanishing_radius = 1.0;
  double vanishing_fraction = 0.01;
  double density_floor = 1e-14;  // cells below this are skipped in log-weighted sums
};

// CSV serialization with the fixed column set
//   t,mass,m2,entropy,interaction,F_u,F_rho,dissipation,max_density,
//   half_mass_radius,boundary_current,flags
// at full double precision.  flags is "c", "v", "cv" or "-".
std::string gauge_csv_header();
std::string gauge_csv_row(const GaugeRecord& g);
void write_gauge_csv(const std::string& path, const std::vector<GaugeRecord>& records);
std::vector<GaugeRecord> read_gauge_csv(const std::string& path);

}  // namespace nlks
