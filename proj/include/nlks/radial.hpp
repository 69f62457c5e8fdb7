// Radial solver for the cumulative-mass form of the normalized system.
//
// In the squared-radius coordinate s = r^2 the equation for the cumulative
// mass fraction M(t,s) reads
//
//     dM/dt = 4 s M_ss + (m(t)/pi) M M_s,      M(t,0) = 0,  M(t,s_max) = 1,
//
// with m(t) taken from the closed-form mass law.  The advective speed
// (m/pi) M is nonnegative, so mass drifts toward the origin (profiles of M
// translate toward -s).  Each step performs a single tridiagonal solve:
// diffusion is implicit with a central second difference, advection is
// implicit in the transported field with its nonlinear coefficient frozen
// at the previous state, and the first-difference stencil switches per node
// between centered and one-sided (+s side) so the step matrix stays an
// M-matrix.  The switch compares 8s against the worst-case advective speed
// times the local spacing and therefore does not depend on the state, which
// keeps two compared runs on identical stencils.  Consequences:
//   * order preservation: two nodewise-ordered monotone profiles stay
//     ordered after every accepted step (inverse-positive matrix, frozen
//     coefficient monotone in the state);
//   * the one-sided region is confined to s of order of the first few cell
//     widths, where the advective coefficient itself is O(s); the
//     semi-discrete residual is O(h^2) under refinement everywhere.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nlks/gauge_record.hpp"
#include "nlks/growth.hpp"
#include "nlks/sgrid.hpp"

namespace nlks {

enum class RadialMode { Normalized, Physical };

struct RadialState {
  SGrid grid;
  std::vector<double> M;  // cumulative mass fraction at nodes, M[0]=0, M[n-1]=1
  double t = 0;
  GrowthParams p{8 * pi_v, 8 * pi_v};
  RadialMode mode = RadialMode::Normalized;
  double rescale = 1;       // factor applied so the sampled profile ends at 1
  double mass_deficit = 0;  // fraction of the profile beyond s_max before rescaling
};

// Samples `cumulative` (a function of the radius r, not s) at the grid
// nodes, validates monotonicity, and rescales so the last node is exactly 1.
// Rejects profiles whose raw value at r_max is below 0.5: the truncation
// domain would hold less than half of the data.
RadialState init_from_profile(SGrid grid, const GrowthParams& p,
                              const std::function<double(double)>& cumulative,
                              RadialMode mode = RadialMode::Normalized);

// Semi-discrete rate dM/dt at one interior node (boundary indices rejected),
// with m(t) from the closed-form mass law.
double rate_at(const RadialState& st, std::size_t i);
// Same for all nodes; boundary entries are 0.
std::vector<double> interior_rate(const RadialState& st);

// Cell-midpoint density (1/pi) dM/ds, n-1 values; multiplied by m(t) in
// Physical mode.
std::vector<double> density_from_mass(const RadialState& st);

// Physical density of the first cell, m(t) * M[1] / (pi s[1]) — the value
// the blow-up ceiling watches.
double central_density(const RadialState& st);

enum class StepStatus { Accepted, RejectedMonotonicity, NonFinite };

struct StepResult {
  StepStatus status = StepStatus::Accepted;
  double violation = 0;  // largest monotonicity defect seen in the update
};

// One implicit step of size dt.  On acceptance the state advances; a step
// whose update breaks monotonicity by more than 1e-12 is rejected and the
// state is left untouched (the caller halves dt).  Values within 1e-13 of
// the bounds 0 and 1 are snapped to the bounds; larger excursions cannot
// occur on an accepted step.
StepResult step(RadialState& st, double dt);

// Advective accuracy bound 0.9 * min_i (h_i * pi / (m(t) * M_i)).
double cfl_dt(const RadialState& st);

enum class StopReason {
  Completed,
  BlowupDensity,      // reconstructed central density crossed the ceiling
  BlowupDtUnderflow,  // repeated rejections drove dt below the floor
};

struct RunOptions {
  double t_end = 0;
  double observe_every = 0;      // <= 0: only initial and final records
  double dt_init = 0;            // <= 0: start from the advective bound
  double dt_max = 1e300;
  double dt_floor = 1e-12;
  double blowup_density = 1e8;   // physical central-density ceiling
  GaugeThresholds thresholds{};
  // called after each observation record is appended
  std::function<void(const RadialState&, const GaugeRecord&)> observer;
};

struct RadialSample {
  RadialState state;
  GaugeRecord record;
};

struct RadialRun {
  std::vector<RadialSample> trajectory;  // one entry per observation time
  StopReason stop = StopReason::Completed;
  double stop_time = 0;
  std::uint64_t steps_accepted = 0;
  std::uint64_t steps_rejected = 0;
  double min_log_hls_gap = 0;  // smallest gap seen across observations
  // concentration radius per observation (NaN where the detector is silent)
  std::vector<double> concentration_radius;

  const RadialState& final_state() const { return trajectory.back().state; }
  std::vector<GaugeRecord> records() const;
};

// Adaptive-dt driver: halves dt on rejection, grows it by 1.25x after 10
// consecutive accepted steps, always capped by the advective bound and by
// the distance to the next observation time.  Stops early with a blow-up
// outcome when the central density crosses the ceiling or dt underflows.
// Throws solver_error on non-finite states.
RadialRun run(RadialState initial, const RunOptions& opt);

}  // namespace nlks
