// 2D Cartesian solver on the square [-L, L]^2 with free-space Poisson
// coupling.
//
// The density u lives at cell centers (n x n cells, h = 2L/n).  The
// potential c solves -Lap c = u on the whole plane: it is computed as the
// aperiodic convolution of u with the cell-averaged kernel
// -(1/2pi) log|x - y| by zero-padding to 2n x 2n and multiplying in
// transform space, so no periodic images pollute the logarithmic far
// field.  Time stepping splits the flow into
//   (a) advection: donor-cell upwind fluxes with face velocities from
//       centered differences of c (no-flux walls),
//   (b) diffusion: one backward-Euler solve of the five-point Laplacian
//       with reflective walls, done exactly in cosine-transform space,
//   (c) reaction: the logistic mass update applied as a uniform factor,
//       which is exact because the growth coefficient is spatially uniform.
// Advection and diffusion conserve discrete mass identically; only the
// reaction changes it, in closed form.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nlks/gauge_record.hpp"
#include "nlks/growth.hpp"

namespace nlks {

class PlanarDomain {
 public:
  // n cells per side (power of two), half-width L
  PlanarDomain(std::size_t n, double L);
  ~PlanarDomain();
  PlanarDomain(PlanarDomain&&) noexcept;
  PlanarDomain& operator=(PlanarDomain&&) noexcept;
  PlanarDomain(const PlanarDomain&) = delete;
  PlanarDomain& operator=(const PlanarDomain&) = delete;

  std::size_t n() const { return n_; }
  double L() const { return L_; }
  double h() const { return h_; }
  double cell_center(std::size_t i) const {
    return -L_ + (static_cast<double>(i) + 0.5) * h_;
  }
  std::size_t idx(std::size_t i, std::size_t j) const { return i + n_ * j; }

  // Free-space potential of the cell-averaged density (n*n values in,
  // n*n out).  Uses scratch buffers, hence non-const.
  std::vector<double> solve_potential(const std::vector<double>& u);

  // One backward-Euler diffusion step with no-flux walls, solved exactly
  // in cosine space.  Preserves the mean; tiny negative roundoff is
  // snapped to zero.
  void diffuse(std::vector<double>& u, double dt);

 private:
  std::size_t n_;
  double L_, h_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct PlanarState {
  double t = 0;
  GrowthParams p{8 * pi_v, 8 * pi_v};
  std::vector<double> u;  // cell averages, size n*n, row-major (x fastest)
};

// Face-normal velocities from centered differences of c: vx lives on
// vertical faces ((n+1) x n, boundary faces zero), vy on horizontal faces
// (n x (n+1)).
struct FaceVelocities {
  std::size_t n = 0;
  std::vector<double> vx, vy;
  double& fx(std::size_t i, std::size_t j) { return vx[i + (n + 1) * j]; }
  double fx(std::size_t i, std::size_t j) const { return vx[i + (n + 1) * j]; }
  double& fy(std::size_t i, std::size_t j) { return vy[i + n * j]; }
  double fy(std::size_t i, std::size_t j) const { return vy[i + n * j]; }
};

FaceVelocities face_velocity(const PlanarDomain& dom, const std::vector<double>& c);
double max_speed(const FaceVelocities& v);

double planar_mass(const PlanarDomain& dom, const std::vector<double>& u);

// Test hook: substep toggles (all on in production).
struct SplitParts {
  bool advection = true;
  bool diffusion = true;
  bool reaction = true;
};

enum class Step2dStatus { Accepted, RejectedCfl, NonFinite };

// One split step A-D-R of size dt.  Rejected (state untouched) when
// max|velocity| * dt > 0.45 h, or when the donor-cell update would drive a
// cell negative beyond roundoff (both are advective stability failures;
// the caller halves dt).  When `speed_out` is given it receives the
// maximum face speed seen, so drivers can pace dt proactively.
Step2dStatus step2d(PlanarDomain& dom, PlanarState& st, double dt,
                    const SplitParts& parts = {}, double* speed_out = nullptr);

struct PlanarRunOptions {
  double t_end = 0;
  double observe_every = 0;
  double dt_init = 0;
  double dt_max = 1e300;
  double dt_floor = 1e-12;
  double blowup_density = 1e8;  // ceiling on max u
  GaugeThresholds thresholds{};
  std::function<void(const PlanarState&, const GaugeRecord&)> observer;
};

enum class PlanarStop { Completed, BlowupDensity, BlowupDtUnderflow };

struct PlanarSample {
  PlanarState state;
  GaugeRecord record;
};

struct PlanarRun {
  std::vector<PlanarSample> trajectory;
  PlanarStop stop = PlanarStop::Completed;
  double stop_time = 0;
  std::uint64_t steps_accepted = 0;
  std::uint64_t steps_rejected = 0;
  double min_log_hls_gap = 0;
  std::vector<double> com_x, com_y;  // center of mass per observation
  // largest support radius seen, against the L/2 validity bound
  double max_support_radius = 0;
  bool support_within_half = true;

  const PlanarState& final_state() const { return trajectory.back().state; }
  std::vector<GaugeRecord> records() const;
};

PlanarRun run2d(PlanarDomain& dom, PlanarState initial, const PlanarRunOptions& opt);

}  // namespace nlks
