#include "nlks/planar.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "nlks/errors.hpp"
#include "nlks/gauges.hpp"

namespace nlks {

namespace {

inline bool power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

struct PlanarDomain::Impl {
  std::size_t n = 0, N = 0;   // cells per side, padded size N = 2n
  double* pad = nullptr;      // N x N real scratch
  fftw_complex* spec = nullptr;  // N x (N/2+1) spectrum scratch
  std::vector<double> kernel_hat;  // real spectrum of the doubled kernel
  double* dct = nullptr;      // n x n scratch for diffusion
  fftw_plan fwd = nullptr, bwd = nullptr, dct_f = nullptr, dct_b = nullptr;

  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (dct_f) fftw_destroy_plan(dct_f);
    if (dct_b) fftw_destroy_plan(dct_b);
    if (pad) fftw_free(pad);
    if (spec) fftw_free(spec);
    if (dct) fftw_free(dct);
  }
};

PlanarDomain::PlanarDomain(std::size_t n, double L) : n_(n), L_(L) {
  if (!power_of_two(n) || n < 8) {
    throw validation_error("cell count per side must be a power of two, at least 8");
  }
  if (!(L > 0) || !std::isfinite(L)) {
    throw validation_error("domain half-width must be positive and finite");
  }
  h_ = 2 * L / static_cast<double>(n);
  impl_ = std::make_unique<Impl>();
  Impl& im = *impl_;
  im.n = n;
  im.N = 2 * n;
  const std::size_t N = im.N;
  im.pad = fftw_alloc_real(N * N);
  im.spec = fftw_alloc_complex(N * (N / 2 + 1));
  im.dct = fftw_alloc_real(n * n);
  if (!im.pad || !im.spec || !im.dct) throw std::bad_alloc();

  // FFTW_ESTIMATE keeps planning deterministic and leaves buffers intact
  im.fwd = fftw_plan_dft_r2c_2d(static_cast<int>(N), static_cast<int>(N), im.pad,
                                im.spec, FFTW_ESTIMATE);
  im.bwd = fftw_plan_dft_c2r_2d(static_cast<int>(N), static_cast<int>(N), im.spec,
                                im.pad, FFTW_ESTIMATE);
  im.dct_f = fftw_plan_r2r_2d(static_cast<int>(n), static_cast<int>(n), im.dct, im.dct,
                              FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
  im.dct_b = fftw_plan_r2r_2d(static_cast<int>(n), static_cast<int>(n), im.dct, im.dct,
                              FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
  if (!im.fwd || !im.bwd || !im.dct_f || !im.dct_b) {
    throw solver_error("transform planning failed");
  }

  // Doubled free-space kernel: value at displacement d is the cell integral
  // -(h^2/2pi) log|d|, with the singular self cell replaced by the analytic
  // average of log over the cell: log h + (pi/2 - 3 - log 2)/2.
  const double scale = -h_ * h_ / (2 * pi_v);
  const double self_avg = std::log(h_) + (pi_v / 2 - 3 - std::log(2.0)) / 2;
  for (std::size_t jy = 0; jy < N; ++jy) {
    const double wy = static_cast<double>(jy) -
                      (jy <= N / 2 ? 0.0 : static_cast<double>(N));
    const double dy = h_ * wy;
    for (std::size_t jx = 0; jx < N; ++jx) {
      const double wx = static_cast<double>(jx) -
                        (jx <= N / 2 ? 0.0 : static_cast<double>(N));
      const double dx = h_ * wx;
      double v;
      if (jx == 0 && jy == 0) {
        v = scale * self_avg;
      } else {
        v = scale * 0.5 * std::log(dx * dx + dy * dy);
      }
      im.pad[jx + N * jy] = v;
    }
  }
  fftw_execute(im.fwd);
  im.kernel_hat.resize(N * (N / 2 + 1));
  const double norm = 1.0 / static_cast<double>(N * N);
  for (std::size_t k = 0; k < im.kernel_hat.size(); ++k) {
    im.kernel_hat[k] = im.spec[k][0] * norm;  // even kernel: spectrum is real
  }
}

PlanarDomain::~PlanarDomain() = default;
PlanarDomain::PlanarDomain(PlanarDomain&&) noexcept = default;
PlanarDomain& PlanarDomain::operator=(PlanarDomain&&) noexcept = default;

std::vector<double> PlanarDomain::solve_potential(const std::vector<double>& u) {
  Impl& im = *impl_;
  const std::size_t n = im.n, N = im.N;
  if (u.size() != n * n) throw validation_error("density array has the wrong size");
  std::memset(im.pad, 0, sizeof(double) * N * N);
  for (std::size_t j = 0; j < n; ++j) {
    std::memcpy(im.pad + N * j, u.data() + n * j, sizeof(double) * n);
  }
  fftw_execute(im.fwd);
  for (std::size_t k = 0; k < im.kernel_hat.size(); ++k) {
    im.spec[k][0] *= im.kernel_hat[k];
    im.spec[k][1] *= im.kernel_hat[k];
  }
  fftw_execute(im.bwd);
  std::vector<double> c(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    std::memcpy(c.data() + n * j, im.pad + N * j, sizeof(double) * n);
  }
  return c;
}

void PlanarDomain::diffuse(std::vector<double>& u, double dt) {
  Impl& im = *impl_;
  const std::size_t n = im.n;
  if (u.size() != n * n) throw validation_error("density array has the wrong size");
  std::memcpy(im.dct, u.data(), sizeof(double) * n * n);
  fftw_execute(im.dct_f);
  const double r = dt / (h_ * h_);
  const double norm = 1.0 / (4.0 * static_cast<double>(n) * static_cast<double>(n));
  std::vector<double> lam(n);
  for (std::size_t k = 0; k < n; ++k) {
    lam[k] = 2 - 2 * std::cos(pi_v * static_cast<double>(k) / static_cast<double>(n));
  }
  for (std::size_t ky = 0; ky < n; ++ky) {
    for (std::size_t kx = 0; kx < n; ++kx) {
      im.dct[kx + n * ky] *= norm / (1 + r * (lam[kx] + lam[ky]));
    }
  }
  fftw_execute(im.dct_b);
  for (std::size_t k = 0; k < n * n; ++k) {
    // the exact backward-Euler solve is positivity preserving; only
    // transform roundoff can undershoot zero
    u[k] = im.dct[k] < 0 ? 0.0 : im.dct[k];
  }
}

FaceVelocities face_velocity(const PlanarDomain& dom, const std::vector<double>& c) {
  const std::size_t n = dom.n();
  const double h = dom.h();
  FaceVelocities v;
  v.n = n;
  v.vx.assign((n + 1) * n, 0.0);
  v.vy.assign(n * (n + 1), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 1; i < n; ++i) {
      v.fx(i, j) = (c[dom.idx(i, j)] - c[dom.idx(i - 1, j)]) / h;
    }
  }
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      v.fy(i, j) = (c[dom.idx(i, j)] - c[dom.idx(i, j - 1)]) / h;
    }
  }
  return v;
}

double max_speed(const FaceVelocities& v) {
  double m = 0;
  for (double x : v.vx) m = std::max(m, std::abs(x));
  for (double x : v.vy) m = std::max(m, std::abs(x));
  return m;
}

Step2dStatus step2d(PlanarDomain& dom, PlanarState& st, double dt,
                    const SplitParts& parts, double* speed_out) {
  if (!(dt > 0) || !std::isfinite(dt)) {
    throw validation_error("step size must be positive and finite");
  }
  const std::size_t n = dom.n();
  const double h = dom.h();
  if (speed_out) *speed_out = 0;

  static thread_local std::vector<double> unew;

  if (parts.advection) {
    const std::vector<double> c = dom.solve_potential(st.u);
    const FaceVelocities v = face_velocity(dom, c);
    const double vmax = max_speed(v);
    if (speed_out) *speed_out = vmax;
    if (!std::isfinite(vmax)) return Step2dStatus::NonFinite;
    if (vmax * dt > 0.45 * h) return Step2dStatus::RejectedCfl;

    double umax = 0;
    for (double w : st.u) umax = std::max(umax, w);

    unew = st.u;
    const double f = dt / h;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 1; i < n; ++i) {
        const double vf = v.fx(i, j);
        const double flux = vf * (vf > 0 ? st.u[dom.idx(i - 1, j)] : st.u[dom.idx(i, j)]);
        unew[dom.idx(i - 1, j)] -= f * flux;
        unew[dom.idx(i, j)] += f * flux;
      }
    }
    for (std::size_t j = 1; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const double vf = v.fy(i, j);
        const double flux = vf * (vf > 0 ? st.u[dom.idx(i, j - 1)] : st.u[dom.idx(i, j)]);
        unew[dom.idx(i, j - 1)] -= f * flux;
        unew[dom.idx(i, j)] += f * flux;
      }
    }
    double worst = 0;
    for (double w : unew) {
      if (!std::isfinite(w)) return Step2dStatus::NonFinite;
      worst = std::min(worst, w);
    }
    if (worst < -1e-12 * std::max(umax, 1.0)) {
      return Step2dStatus::RejectedCfl;  // donor-cell stability failure
    }
    for (double& w : unew) {
      if (w < 0) w = 0;
    }
    st.u.swap(unew);
  }

  if (parts.diffusion) {
    dom.diffuse(st.u, dt);
    for (double w : st.u) {
      if (!std::isfinite(w)) return Step2dStatus::NonFinite;
    }
  }

  if (parts.reaction) {
    const double mcur = planar_mass(dom, st.u);
    if (mcur > 1e-300) {
      const double M0 = st.p.M0;
      const double mnew = M0 / (1 + ((M0 - mcur) / mcur) * std::exp(-M0 * dt));
      const double factor = mnew / mcur;
      for (double& w : st.u) w *= factor;
    }
  }

  st.t += dt;
  return Step2dStatus::Accepted;
}

std::vector<GaugeRecord> PlanarRun::records() const {
  std::vector<GaugeRecord> out;
  out.reserve(trajectory.size());
  for (const auto& s : trajectory) out.push_back(s.record);
  return out;
}

PlanarRun run2d(PlanarDomain& dom, PlanarState initial, const PlanarRunOptions& opt) {
  if (!(opt.t_end >= initial.t)) {
    throw validation_error("t_end must not precede the initial time");
  }
  PlanarRun out;
  GaugeThresholds th = opt.thresholds;
  if (std::isnan(th.concentration_fraction)) {
    th.concentration_fraction = 8 * pi_v / initial.p.M0;
  }

  double last_speed = 0;
  const auto observe = [&](PlanarState& st) {
    std::vector<double> c = dom.solve_potential(st.u);
    FaceVelocities v = face_velocity(dom, c);
    last_speed = std::max(last_speed, max_speed(v));
    GaugeRecord rec = planar_record(dom, st, c, v, th);
    const double gap = log_hls_gap_planar(dom, st.u, c);
    if (out.trajectory.empty()) {
      out.min_log_hls_gap = gap;
    } else {
      out.min_log_hls_gap = std::min(out.min_log_hls_gap, gap);
    }
    const auto com = center_of_mass(dom, st.u);
    out.com_x.push_back(com.first);
    out.com_y.push_back(com.second);
    const double sr = support_radius(dom, st.u);
    out.max_support_radius = std::max(out.max_support_radius, sr);
    if (sr > dom.L() / 2) out.support_within_half = false;
    out.trajectory.push_back({st, rec});
    if (opt.observer) opt.observer(st, rec);
  };

  PlanarState st = std::move(initial);
  observe(st);
  if (opt.t_end == st.t) {
    out.stop = PlanarStop::Completed;
    out.stop_time = st.t;
    return out;
  }

  const double observe_every =
      opt.observe_every > 0 ? opt.observe_every : opt.t_end - st.t;
  const double t0 = st.t;
  std::size_t next_obs = 1;
  auto obs_time = [&](std::size_t k) {
    return std::min(t0 + static_cast<double>(k) * observe_every, opt.t_end);
  };

  double dt_target = opt.dt_init > 0 ? opt.dt_init : opt.dt_max;
  if (opt.dt_init <= 0 && last_speed > 0) {
    dt_target = std::min(dt_target, 0.9 * 0.45 * dom.h() / last_speed);
  }
  if (!(dt_target < 1e290)) dt_target = observe_every;  // nothing else caps it
  int consecutive = 0;
  for (;;) {
    const double t_next = obs_time(next_obs);
    double dt = std::min({dt_target, opt.dt_max, t_next - st.t});
    if (last_speed > 0) dt = std::min(dt, 0.9 * 0.45 * dom.h() / last_speed);
    if (dt <= 0) dt = opt.dt_floor;
    double speed = 0;
    const Step2dStatus status = step2d(dom, st, dt, {}, &speed);
    if (speed > 0) last_speed = speed;
    if (status == Step2dStatus::NonFinite) {
      throw solver_error("2D step produced a non-finite field at t = " +
                         std::to_string(st.t));
    }
    if (status == Step2dStatus::RejectedCfl) {
      ++out.steps_rejected;
      consecutive = 0;
      dt_target = dt / 2;
      if (dt_target < opt.dt_floor) {
        out.stop = PlanarStop::BlowupDtUnderflow;
        out.stop_time = st.t;
        observe(st);
        return out;
      }
      continue;
    }
    ++out.steps_accepted;
    if (++consecutive >= 10) {
      dt_target *= 1.25;
      consecutive = 0;
    }
    double umax = 0;
    for (double w : st.u) umax = std::max(umax, w);
    if (umax > opt.blowup_density) {
      out.stop = PlanarStop::BlowupDensity;
      out.stop_time = st.t;
      observe(st);
      return out;
    }
    const double t_tol = 1e-12 * std::max(1.0, std::abs(t_next));
    if (st.t >= t_next - t_tol) {
      observe(st);
      if (st.t >= opt.t_end - t_tol) {
        out.stop = PlanarStop::Completed;
        out.stop_time = st.t;
        return out;
      }
      while (obs_time(next_obs) <= st.t + t_tol) ++next_obs;
    }
  }
}

}  // namespace nlks
