// Scenario configuration: a single sectioned key = value document.
//
//   name = vanish-demo
//   solver = radial            # or planar
//   [growth]
//   M0 = 4pi                   # numbers accept a trailing "pi" multiplier
//   m0 = 2pi
//   m2 = 12.5                  # optional: initial second moment for the
//                              # classifier when the profile implies none
//   [initial]
//   kind = scaled_steady       # steady | scaled_steady | gaussian | ramp
//   factor = 0.5               #        | custom_samples
//   lambda = 1
//   [grid]
//   n = 512
//   s_max = 1e4                # radial extent (s = r^2); planar uses L
//   stretch = 1e4              # coarsest/finest spacing ratio
//   [time]
//   t_end = 200
//   observe_every = 2          # default t_end/100
//   [detectors]
//   blowup_density = 1e8
//   [run]
//   reproducible = true
//
// Unknown sections or keys are errors, as are duplicated keys; every
// documented hypothesis of the regime being exercised is validated eagerly.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nlks/gauge_record.hpp"

namespace nlks {

struct InitialConfig {
  enum class Kind { Steady, ScaledSteady, Gaussian, Ramp, CustomSamples };
  Kind kind = Kind::Gaussian;
  double lambda = 1;         // steady family scale
  bool peak_form = false;    // steady: lambda parameterizes the density peak
  double factor = 1;         // scaled_steady multiplier
  double tail_lambda = -1;   // scaled_steady closure tail; <= 0 means s_max/16
  double sigma = -1;         // gaussian width (exclusive with m2)
  double m2 = -1;            // gaussian second moment (sets sigma)
  std::string samples_path;  // custom_samples: CSV of r,cumulative rows
};

struct ScenarioConfig {
  std::string name;
  enum class Solver { Radial, Planar };
  Solver solver = Solver::Radial;

  double M0 = 0, m0 = 0;
  std::optional<double> m2_0;  // [growth] m2

  InitialConfig initial;

  std::size_t grid_n = 512;
  double s_max = 1e4;
  double stretch = 1e4;
  double L = 8;  // planar half-width

  double t_end = -1;
  double observe_every = -1;  // < 0: t_end / 100
  double dt_max = 1e300;
  double dt_init = 0;

  GaugeThresholds thresholds{};
  double blowup_density = 1e8;

  bool reproducible = true;
  std::uint64_t seed = 0;
  bool snapshots = false;

  std::string raw_text;  // the document as parsed, for hashing and copying
};

// "8pi", "pi", "0.5pi" or any strtod literal
double parse_number_with_pi(const std::string& text);

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

// FNV-1a of the raw document, folded to 8 hex digits; names output dirs
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace nlks
