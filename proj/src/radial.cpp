#include "nlks/radial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlks/errors.hpp"
#include "nlks/gauges.hpp"

namespace nlks {

namespace {

constexpr double kMonotoneTol = 1e-12;  // rejection threshold for a step
constexpr double kSnapBand = 1e-13;     // roundoff band snapped onto [0, 1]

// Stencil weights for the operator 4s M_ss + a M_s at an interior node.
// lo/up multiply the left/right neighbors; the diagonal weight is
// -(lo + up) because every difference used has zero row sum.  `centered`
// selects the first-difference stencil; with the one-sided (+s) choice the
// advection contributes only to `up`.  Both weights are nonnegative when
// `centered` is granted only where 8s >= a_max * h_p.
struct Weights {
  double lo, up;
};

inline Weights stencil(double s, double h_m, double h_p, double a, bool centered) {
  const double denom = h_m + h_p;
  Weights w;
  w.lo = 4 * s * 2 / (h_m * denom);
  w.up = 4 * s * 2 / (h_p * denom);
  if (centered) {
    w.lo -= a * h_p / (h_m * denom);
    w.up += a * h_m / (h_p * denom);
  } else {
    w.up += a / h_p;
  }
  return w;
}

inline bool centered_ok(double s, double h_p, double a_max) {
  return 8 * s >= a_max * h_p;
}

}  // namespace

RadialState init_from_profile(SGrid grid, const GrowthParams& p,
                              const std::function<double(double)>& cumulative,
                              RadialMode mode) {
  RadialState st;
  st.grid = std::move(grid);
  st.p = p;
  st.mode = mode;
  const std::size_t n = st.grid.n();
  st.M.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.M[i] = cumulative(std::sqrt(st.grid.s[i]));
  }
  if (st.M[0] != 0) {
    throw validation_error("initial profile must vanish at r = 0");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(st.M[i + 1] >= st.M[i]) || !std::isfinite(st.M[i + 1])) {
      throw validation_error("initial profile must be nondecreasing and finite (node " +
                             std::to_string(i + 1) + ")");
    }
  }
  const double tail = st.M[n - 1];
  if (tail < 0.5) {
    throw validation_error(
        "initial profile holds less than half of its mass inside the domain; "
        "enlarge s_max (value at the outer edge: " +
        std::to_string(tail) + ")");
  }
  st.mass_deficit = 1 - tail;
  st.rescale = 1 / tail;
  for (double& v : st.M) v *= st.rescale;
  st.M[n - 1] = 1;  // exact boundary value
  return st;
}

double rate_at(const RadialState& st, std::size_t i) {
  const std::size_t n = st.grid.n();
  if (i == 0 || i + 1 >= n) {
    throw validation_error("rate is defined at interior nodes only");
  }
  const double m = mass_at(st.p, st.t);
  const double a_max = m / pi_v;
  const double s = st.grid.s[i];
  const double h_m = st.grid.s[i] - st.grid.s[i - 1];
  const double h_p = st.grid.s[i + 1] - st.grid.s[i];
  const double a = a_max * st.M[i];
  const Weights w = stencil(s, h_m, h_p, a, centered_ok(s, h_p, a_max));
  return w.lo * st.M[i - 1] + w.up * st.M[i + 1] - (w.lo + w.up) * st.M[i];
}

std::vector<double> interior_rate(const RadialState& st) {
  const std::size_t n = st.grid.n();
  std::vector<double> rate(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) rate[i] = rate_at(st, i);
  return rate;
}

std::vector<double> density_from_mass(const RadialState& st) {
  const std::size_t n = st.grid.n();
  std::vector<double> rho(n - 1);
  const double factor =
      st.mode == RadialMode::Physical ? mass_at(st.p, st.t) / pi_v : 1 / pi_v;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    rho[i] = factor * (st.M[i + 1] - st.M[i]) / st.grid.h(i);
  }
  return rho;
}

double central_density(const RadialState& st) {
  return mass_at(st.p, st.t) * st.M[1] / (pi_v * st.grid.s[1]);
}

StepResult step(RadialState& st, double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) {
    throw validation_error("step size must be positive and finite");
  }
  const std::size_t n = st.grid.n();
  const double m = mass_at(st.p, st.t + dt / 2);
  const double a_max = m / pi_v;

  // Assemble (I - dt L) x = M_old with the advective coefficient frozen at
  // the previous state, then solve by the Thomas algorithm.  Rows are
  // strictly diagonally dominant: diag = 1 + |lo| + |up|.
  static thread_local std::vector<double> lo, di, up, rhs, x;
  lo.assign(n, 0.0);
  di.assign(n, 1.0);
  up.assign(n, 0.0);
  rhs.resize(n);
  x.resize(n);
  rhs[0] = 0;
  rhs[n - 1] = 1;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double s = st.grid.s[i];
    const double h_m = s - st.grid.s[i - 1];
    const double h_p = st.grid.s[i + 1] - s;
    const double a = a_max * st.M[i];
    const Weights w = stencil(s, h_m, h_p, a, centered_ok(s, h_p, a_max));
    lo[i] = -dt * w.lo;
    up[i] = -dt * w.up;
    di[i] = 1 + dt * (w.lo + w.up);
    rhs[i] = st.M[i];
  }

  // forward sweep
  double piv = di[0];
  x[0] = rhs[0];
  static thread_local std::vector<double> cp;
  cp.resize(n);
  cp[0] = up[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = di[i] - lo[i] * cp[i - 1];
    cp[i] = up[i] / piv;
    x[i] = (rhs[i] - lo[i] * x[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    x[i] -= cp[i] * x[i + 1];
  }

  double violation = 0;
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) {
      finite = false;
      break;
    }
    if (x[i] < 0) {
      if (x[i] >= -kSnapBand) {
        x[i] = 0;
      } else {
        violation = std::max(violation, -x[i]);
      }
    } else if (x[i] > 1) {
      if (x[i] <= 1 + kSnapBand) {
        x[i] = 1;
      } else {
        violation = std::max(violation, x[i] - 1);
      }
    }
  }
  if (!finite) return {StepStatus::NonFinite, 0};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    violation = std::max(violation, x[i] - x[i + 1]);
  }
  if (violation > kMonotoneTol) {
    return {StepStatus::RejectedMonotonicity, violation};
  }
  // Accepted: repair sub-tolerance wiggles so the stored profile is exactly
  // monotone in [0, 1] (the repair moves values by at most `violation`).
  double floor_v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    floor_v = std::max(floor_v, std::min(x[i], 1.0));
    st.M[i] = floor_v;
  }
  st.M[0] = 0;
  st.M[n - 1] = 1;
  st.t += dt;
  return {StepStatus::Accepted, violation};
}

double cfl_dt(const RadialState& st) {
  const double m = mass_at(st.p, st.t);
  double dt = 1e300;
  const std::size_t n = st.grid.n();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (st.M[i] <= 0) continue;
    dt = std::min(dt, st.grid.h(i) * pi_v / (m * st.M[i]));
  }
  return 0.9 * dt;
}

std::vector<GaugeRecord> RadialRun::records() const {
  std::vector<GaugeRecord> out;
  out.reserve(trajectory.size());
  for (const auto& s : trajectory) out.push_back(s.record);
  return out;
}

RadialRun run(RadialState initial, const RunOptions& opt) {
  if (!(opt.t_end >= initial.t)) {
    throw validation_error("t_end must not precede the initial time");
  }
  RadialRun out;
  GaugeThresholds th = opt.thresholds;
  if (std::isnan(th.concentration_fraction)) {
    th.concentration_fraction = 8 * pi_v / initial.p.M0;
  }

  const auto observe = [&](const RadialState& st) {
    GaugeRecord rec = radial_record(st, th);
    const double gap = log_hls_gap_radial(st);
    if (out.trajectory.empty()) {
      out.min_log_hls_gap = gap;
    } else {
      out.min_log_hls_gap = std::min(out.min_log_hls_gap, gap);
    }
    const auto radius = detect_concentration(st, th.concentration_fraction);
    out.concentration_radius.push_back(radius ? *radius
                                              : std::nan(""));
    out.trajectory.push_back({st, rec});
    if (opt.observer) opt.observer(st, rec);
  };

  RadialState st = std::move(initial);
  observe(st);
  if (opt.t_end == st.t) {
    out.stop = StopReason::Completed;
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

  double dt_target = opt.dt_init > 0 ? opt.dt_init : std::min(cfl_dt(st), opt.dt_max);
  int consecutive = 0;
  for (;;) {
    const double t_next = obs_time(next_obs);
    double dt = std::min({dt_target, opt.dt_max, cfl_dt(st), t_next - st.t});
    if (dt <= 0) dt = opt.dt_floor;  // degenerate gap to the next event
    const StepResult res = step(st, dt);
    if (res.status == StepStatus::NonFinite) {
      throw solver_error("time step produced a non-finite profile at t = " +
                         std::to_string(st.t));
    }
    if (res.status == StepStatus::RejectedMonotonicity) {
      ++out.steps_rejected;
      consecutive = 0;
      dt_target = dt / 2;
      if (dt_target < opt.dt_floor) {
        out.stop = StopReason::BlowupDtUnderflow;
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
    if (central_density(st) > opt.blowup_density) {
      out.stop = StopReason::BlowupDensity;
      out.stop_time = st.t;
      observe(st);
      return out;
    }
    const double t_tol = 1e-12 * std::max(1.0, std::abs(t_next));
    if (st.t >= t_next - t_tol) {
      observe(st);
      if (st.t >= opt.t_end - t_tol) {
        out.stop = StopReason::Completed;
        out.stop_time = st.t;
        return out;
      }
      while (obs_time(next_obs) <= st.t + t_tol) ++next_obs;
    }
  }
}

}  // namespace nlks
