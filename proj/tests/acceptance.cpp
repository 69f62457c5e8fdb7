// End-to-end acceptance gates: twelve numbered checks covering the mass
// law, moment-driven collapse detection, conditional outcomes, fixed-point
// accuracy, vanishing and concentration, the discrete comparison
// principle, the energy inequality, the log-HLS floor, the long-horizon
// concentration proxy, and cross-solver agreement.  Each check prints one
// PASS/FAIL line with the measured number and its gate; the process exits
// nonzero if any gate fails.
//
// Grids, detector ceilings, and tolerances are calibrated: every database
// below was measured on this exact configuration and frozen with margin.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "nlks/config.hpp"
#include "nlks/envelope.hpp"
#include "nlks/gauges.hpp"
#include "nlks/growth.hpp"
#include "nlks/planar.hpp"
#include "nlks/radial.hpp"
#include "nlks/scenario.hpp"
#include "nlks/steady.hpp"

using namespace nlks;

namespace {

constexpr double kPi = pi_v;

struct Gate {
  int id;
  std::string label;
  bool pass;
  std::string detail;
};
std::vector<Gate> gates;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
  gates.push_back({id, label, pass, detail});
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// smallest log-HLS gap seen across every gauge-producing run in checks 1-9
double global_min_gap = 1e300;
void track_gap(double g) { global_min_gap = std::min(global_min_gap, g); }

RadialState radial_gaussian(std::size_t n, double s_max, double stretch,
                            const GrowthParams& p, double sigma2) {
  return init_from_profile(SGrid::geometric(n, s_max, stretch), p,
                           [sigma2](double r) {
                             return -std::expm1(-r * r / (2 * sigma2));
                           });
}

// threshold-relative profile with the far-field closure used by the
// scenario builder: max of the scaled steady core and a wide steady tail
RadialState radial_scaled_steady(std::size_t n, double s_max, double stretch,
                                 const GrowthParams& p, double factor,
                                 double lambda) {
  double tail = s_max / 16.0;
  double frac = 8 * kPi / p.M0;
  return init_from_profile(
      SGrid::geometric(n, s_max, stretch), p, [=](double r) {
        double s = r * r;
        return std::min(1.0, std::max(factor * frac * s / (s + lambda),
                                      s / (s + tail)));
      });
}

// linear interpolation of the mass fraction at a given s
double mass_fraction_at(const RadialState& st, double s) {
  const auto& sv = st.grid.s;
  auto it = std::lower_bound(sv.begin(), sv.end(), s);
  std::size_t j = static_cast<std::size_t>(it - sv.begin());
  if (j == 0) return st.M.front();
  if (j >= sv.size()) return st.M.back();
  double w = (s - sv[j - 1]) / (sv[j] - sv[j - 1]);
  return st.M[j - 1] + w * (st.M[j] - st.M[j - 1]);
}

// ---- check 1: mass follows the closed-form law ---------------------------

void check_mass_law() {
  std::mt19937_64 rng(20240817u);
  std::uniform_real_distribution<double> uM(2 * kPi, 20 * kPi);
  std::uniform_real_distribution<double> um(0.5 * kPi, 20 * kPi);
  double worst_r = 0;
  for (int k = 0; k < 20; ++k) {
    GrowthParams p(uM(rng), um(rng));
    auto st = radial_gaussian(128, 1e4, 1e4, p, 1.0);
    st.mode = RadialMode::Physical;
    RunOptions opt;
    opt.t_end = 1.0;
    opt.observe_every = 0.1;
    auto res = run(st, opt);
    track_gap(res.min_log_hls_gap);
    for (const auto& smp : res.trajectory) {
      double want = mass_at(p, smp.record.t);
      worst_r = std::max(worst_r, std::abs(smp.record.mass - want) / want);
    }
  }
  report(1, "reported mass follows the closed-form law (radial, 20 random pairs)",
         worst_r < 1e-6, "worst rel err " + fmt(worst_r) + ", gate 1e-6");

  const GrowthParams pairs[3] = {{5 * kPi, 3 * kPi}, {4 * kPi, 2 * kPi},
                                 {6 * kPi, 5 * kPi}};
  double worst_p = 0;
  for (const auto& p : pairs) {
    std::size_t n = 256;
    PlanarDomain dom(n, 12.0);
    PlanarState ps;
    ps.p = p;
    ps.u.resize(n * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        double x = dom.cell_center(i), y = dom.cell_center(j);
        ps.u[dom.idx(i, j)] = std::exp(-(x * x + y * y) / 2);
      }
    double md = planar_mass(dom, ps.u);
    for (auto& v : ps.u) v *= p.m0 / md;
    PlanarRunOptions po;
    po.t_end = 1.0;
    po.observe_every = 0.1;
    auto pr = run2d(dom, ps, po);
    track_gap(pr.min_log_hls_gap);
    for (const auto& smp : pr.trajectory) {
      double want = mass_at(p, smp.record.t);
      worst_p = std::max(worst_p, std::abs(smp.record.mass - want) / want);
    }
  }
  report(1, "reported mass follows the closed-form law (planar, 3 pairs, n=256)",
         worst_p < 1e-3, "worst rel err " + fmt(worst_p) + ", gate 1e-3");
}

// ---- checks 2 and 3: second-moment tracking and collapse detection -------

void check_second_moment_and_detection() {
  GrowthParams p(16 * kPi, 16 * kPi);
  auto st = radial_gaussian(1024, 100.0, 1e5, p, 1.0 / (32 * kPi));
  RunOptions opt;
  opt.t_end = 0.02;
  opt.observe_every = 2e-4;
  opt.blowup_density = 1e5;
  auto res = run(st, opt);
  track_gap(res.min_log_hls_gap);

  double worst = 0;
  for (const auto& smp : res.trajectory) {
    double exact = second_moment_at(p, 1.0, smp.record.t);
    if (exact < 0.2) break;  // collapse contaminates resolution beyond this
    worst = std::max(worst, std::abs(smp.record.m2 - exact) / exact);
  }
  report(2, "second moment tracks the linear-in-time closed form down to 0.2",
         worst < 1e-2, "worst rel err " + fmt(worst) + ", gate 1e-2");

  double t_ref = 1.0 / (64 * kPi);  // moment-vanishing time for this data
  double ratio = res.stop_time / t_ref;
  bool fired = res.stop == StopReason::BlowupDensity;
  report(3, "collapse detector fires within the calibrated band of t_ref",
         fired && ratio >= 0.5 && ratio <= 3.0,
         fired ? "detected at " + fmt(ratio) + " t_ref, band [0.5, 3]"
               : "detector never fired");
}

// ---- check 4: moment-conditional outcome above the mass threshold --------

void check_conditional_outcome() {
  const std::string common =
      "solver = radial\n[growth]\nM0 = 4pi\nm0 = 16pi\nm2 = ";
  auto cfg_small = parse_config(
      "name = tight-start\n" + common + "2\n[initial]\nkind = gaussian\nm2 = 2\n"
      "[grid]\nn = 1024\ns_max = 100\nstretch = 1e5\n"
      "[time]\nt_end = 0.1\nobserve_every = 1e-3\n"
      "[detectors]\nblowup_density = 3e5\n");
  auto rep_small = run_scenario(cfg_small);
  track_gap(rep_small.min_log_hls_gap);
  bool small_ok = rep_small.predicted == "ConditionalFiniteBlowup" &&
                  rep_small.observed.substr(0, 6) == "blowup" && rep_small.agree;
  std::string det = "m2_0=2: predicted " + rep_small.predicted + ", observed " +
                    rep_small.observed;
  if (rep_small.analytic_blowup_time)
    det += " at " + fmt(rep_small.observed_time / *rep_small.analytic_blowup_time) +
           " of the proved bound";
  report(4, "small second moment above threshold collapses", small_ok, det);

  auto cfg_wide = parse_config(
      "name = wide-start\n" + common + "10\n[initial]\nkind = gaussian\nm2 = 10\n"
      "[grid]\nn = 1024\ns_max = 100\nstretch = 1e5\n"
      "[time]\nt_end = 5\nobserve_every = 0.05\n"
      "[detectors]\nblowup_density = 1e5\n");
  auto rep_wide = run_scenario(cfg_wide);
  track_gap(rep_wide.min_log_hls_gap);
  bool wide_ok = rep_wide.predicted == "OpenCritical" &&
                 rep_wide.observed == "completed" && rep_wide.agree;
  report(4, "wide second moment above threshold runs out the horizon, labeled open",
         wide_ok, "m2_0=10: predicted " + rep_wide.predicted + ", observed " +
                      rep_wide.observed + " at t=5");
}

// ---- check 5: the steady profile is a second-order-accurate fixed point --

void check_steady_fixed_point() {
  double drift[2];
  const std::size_t ns[2] = {1024, 2048};
  for (int k = 0; k < 2; ++k) {
    GrowthParams p(8 * kPi, 8 * kPi);
    auto st = init_from_profile(SGrid::geometric(ns[k], 1e6, 1e6), p,
                                [](double r) {
                                  double s = r * r;
                                  return s / (s + 1.0);
                                });
    auto initial = st.M;
    RunOptions opt;
    opt.t_end = 1.0;
    auto res = run(st, opt);
    track_gap(res.min_log_hls_gap);
    double d = 0;
    const auto& Mf = res.final_state().M;
    for (std::size_t i = 0; i < Mf.size(); ++i)
      d = std::max(d, std::abs(Mf[i] - initial[i]));
    drift[k] = d;
  }
  double ratio = drift[0] / drift[1];
  bool ok = drift[1] < 1e-3 && ratio > 2.8 && ratio < 5.5;
  report(5, "steady profile drifts < 1e-3 by t=1 at n=2048, shrinking at 2nd order",
         ok, "drift " + fmt(drift[1]) + " (gate 1e-3), refinement ratio " +
                 fmt(ratio) + " (band [2.8, 5.5])");
}

// ---- check 6: sub-threshold data empties the unit disk -------------------

void check_vanishing() {
  GrowthParams p(4 * kPi, 2 * kPi);
  auto st = radial_scaled_steady(512, 1e4, 1e4, p, 0.9, 1.0);
  RunOptions opt;
  opt.t_end = 200.0;
  opt.observe_every = 2.0;
  auto res = run(st, opt);
  track_gap(res.min_log_hls_gap);
  double frac = mass_fraction_at(res.final_state(), 1.0);
  bool ok = res.stop == StopReason::Completed && frac < 0.01;
  report(6, "mass fraction inside r=1 falls below 1% by t=200", ok,
         "fraction " + fmt(frac) + ", gate 0.01");
}

// ---- check 7: super-threshold data concentrates at shrinking radii -------

void check_concentration() {
  GrowthParams p(16 * kPi, 32 * kPi);
  auto st = radial_scaled_steady(1024, 1e4, 1e4, p, 1.1, 1.0);
  RunOptions opt;
  opt.t_end = 150.0;
  opt.observe_every = 1.0;
  opt.blowup_density = 500.0;  // calibrated to what this grid can resolve
  auto res = run(st, opt);
  track_gap(res.min_log_hls_gap);

  // enclosing radius for half the mass, per observation, until the stop
  int count = 0;
  bool nonincreasing = true;
  double first = -1, last = -1, prev = 1e300;
  for (double r : res.concentration_radius) {
    if (std::isnan(r)) continue;
    if (first < 0) first = r;
    last = r;
    ++count;
    if (r > prev + 1e-12) nonincreasing = false;
    prev = r;
  }
  bool ok = res.stop == StopReason::BlowupDensity && nonincreasing && count >= 10;
  report(7, "half-mass radii shrink monotonically until the ceiling fires", ok,
         "radius " + fmt(first) + " -> " + fmt(last) + " over " +
             std::to_string(count) + " observations, stop at t=" +
             fmt(res.stop_time));
}

// ---- check 8: discrete comparison principle ------------------------------

void check_comparison() {
  std::mt19937_64 rng(777u);
  std::uniform_real_distribution<double> uL(0.3, 3.3);
  std::uniform_real_distribution<double> uS(0.5, 2.5);
  std::uniform_real_distribution<double> uM(4 * kPi, 12 * kPi);
  double worst = -1e300;
  std::uint64_t rejected = 0;
  for (int pair = 0; pair < 50; ++pair) {
    double l1 = uL(rng), l2 = uL(rng), sg = uS(rng);
    GrowthParams p(uM(rng), uM(rng));
    auto f = [&](double r) {
      double s = r * r;
      return s / (s + l1);
    };
    auto g = [&](double r) {
      double s = r * r;
      return -std::expm1(-s / (2 * sg * sg)) * 0.2 + 0.8 * s / (s + l2);
    };
    auto grid = SGrid::geometric(96, 100.0, 100.0);
    auto a = init_from_profile(grid, p, [&](double r) { return std::min(f(r), g(r)); });
    auto b = init_from_profile(grid, p, [&](double r) { return std::max(f(r), g(r)); });
    double defect0 = 0;
    for (std::size_t i = 0; i < a.M.size(); ++i)
      defect0 = std::max(defect0, a.M[i] - b.M[i]);
    double dt = 0.2 * std::min(cfl_dt(a), cfl_dt(b));
    for (int k = 0; k < 10000; ++k) {
      if (step(a, dt).status != StepStatus::Accepted) ++rejected;
      if (step(b, dt).status != StepStatus::Accepted) ++rejected;
    }
    for (std::size_t i = 0; i < a.M.size(); ++i)
      worst = std::max(worst, a.M[i] - b.M[i] - defect0);
    track_gap(log_hls_gap_radial(a));
    track_gap(log_hls_gap_radial(b));
  }
  bool ok = worst <= 1e-14 && rejected == 0;
  report(8, "50 ordered pairs stay ordered through 10^4 steps each", ok,
         "largest ordering defect " + fmt(worst) + " (gate 1e-14), " +
             std::to_string(rejected) + " rejected steps");
}

// ---- check 9: free-energy inequality along relaxing runs -----------------

void check_energy_inequality() {
  const GrowthParams pairs[5] = {{8 * kPi, 4 * kPi},
                                 {8 * kPi, 2 * kPi},
                                 {6 * kPi, 3 * kPi},
                                 {4 * kPi, 2 * kPi},
                                 {7 * kPi, 6 * kPi}};
  bool all_ok = true;
  std::string det;
  for (const auto& p : pairs) {
    auto st = radial_gaussian(1024, 1e4, 1e4, p, 1.0);
    RunOptions opt;
    opt.t_end = 2.0;
    opt.observe_every = 0.02;
    auto res = run(st, opt);
    track_gap(res.min_log_hls_gap);
    auto recs = res.records();
    std::size_t N = recs.size();
    std::vector<double> t(N), D(N), corr(N), F(N);
    for (std::size_t k = 0; k < N; ++k) {
      t[k] = recs[k].t;
      D[k] = recs[k].dissipation;
      F[k] = recs[k].free_energy;
      // mass exchange with the reservoir enters the balance through the
      // interaction term, weighted by the remaining growth headroom
      corr[k] = ((p.M0 - recs[k].mass) / (2 * recs[k].mass)) * recs[k].interaction;
    }
    auto trapz = [&](const std::vector<double>& f, std::size_t upto,
                     std::size_t stride) {
      double acc = 0;
      for (std::size_t k = stride; k <= upto; k += stride)
        acc += 0.5 * (f[k] + f[k - stride]) * (t[k] - t[k - stride]);
      return acc;
    };
    double margin = -1e300;
    for (std::size_t j = 1; j < N; ++j)
      margin = std::max(margin, F[j] + trapz(D, j, 1) + trapz(corr, j, 1) - F[0]);
    // quadrature-error estimate: halved-cadence comparison on both integrals
    std::size_t Ne = (N - 1) & ~std::size_t(1);
    double rich = (std::abs(trapz(D, Ne, 1) - trapz(D, Ne, 2)) +
                   std::abs(trapz(corr, Ne, 1) - trapz(corr, Ne, 2))) /
                  3.0;
    double tol = 10 * (rich + 1e-8);
    if (margin > tol) all_ok = false;
    if (!det.empty()) det += "; ";
    det += fmt(margin) + " vs " + fmt(tol);
  }
  report(9, "free-energy balance holds at every observation on 5 relaxing runs",
         all_ok, "per-run margin vs quadrature gate: " + det);
}

// ---- check 10: log-HLS floor across everything above ---------------------

void check_gap_floor() {
  report(10, "log-HLS gap stays above -1e-3 on every snapshot from checks 1-9",
         global_min_gap >= -1e-3,
         "smallest gap seen " + fmt(global_min_gap) + ", floor -1e-3");
}

// ---- check 11: long-horizon concentration proxy at threshold mass --------

void check_infinite_time_proxy() {
  GrowthParams p(8 * kPi, 4 * kPi);
  auto st = radial_gaussian(2048, 1e4, 1e5, p, 1.0);
  RunOptions opt;
  opt.t_end = 500.0;
  opt.observe_every = 5.0;
  auto res = run(st, opt);
  auto recs = res.records();
  std::size_t N = recs.size();
  bool entropy_up = true, radius_down = true;
  std::size_t start = N / 5;  // last 80% of the observation times
  for (std::size_t k = start + 1; k < N; ++k) {
    if (!(recs[k].entropy > recs[k - 1].entropy)) entropy_up = false;
    if (!(recs[k].half_mass_radius < recs[k - 1].half_mass_radius))
      radius_down = false;
  }
  bool ok = res.stop == StopReason::Completed && entropy_up && radius_down;
  report(11,
         "entropy rises and half-mass radius falls across the last 80% of t<=500",
         ok, "entropy " + fmt(recs[start].entropy) + " -> " + fmt(recs[N - 1].entropy) +
                 ", radius " + fmt(recs[start].half_mass_radius) + " -> " +
                 fmt(recs[N - 1].half_mass_radius));
}

// ---- check 12: the two solvers tell the same story -----------------------

void check_cross_solver() {
  GrowthParams p(4 * kPi, 2 * kPi);
  auto rs = radial_gaussian(1024, 1e4, 1e4, p, 1.0);
  RunOptions ro;
  ro.t_end = 0.5;
  ro.observe_every = 0.05;
  auto rr = run(rs, ro);

  std::size_t n = 512;
  PlanarDomain dom(n, 20.0);
  PlanarState ps;
  ps.p = p;
  ps.u.resize(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      double x = dom.cell_center(i), y = dom.cell_center(j);
      ps.u[dom.idx(i, j)] = std::exp(-(x * x + y * y) / 2);
    }
  double md = planar_mass(dom, ps.u);
  for (auto& v : ps.u) v *= 2 * kPi / md;
  PlanarRunOptions po;
  po.t_end = 0.5;
  po.observe_every = 0.05;
  auto pr = run2d(dom, ps, po);

  double wm = 0, w2 = 0, ws = 0;
  std::size_t K = std::min(rr.trajectory.size(), pr.trajectory.size());
  for (std::size_t k = 0; k < K; ++k) {
    const auto& a = rr.trajectory[k].record;
    const auto& b = pr.trajectory[k].record;
    wm = std::max(wm, std::abs(a.mass - b.mass) / std::abs(a.mass));
    w2 = std::max(w2, std::abs(a.m2 - b.m2) / std::abs(a.m2));
    ws = std::max(ws, std::abs(a.entropy - b.entropy) / std::abs(a.entropy));
  }
  bool ok = wm < 5e-2 && w2 < 5e-2 && ws < 5e-2 && pr.support_within_half;
  report(12, "radial and planar gauge series agree to 5% on [0, 0.5]", ok,
         "rel diff mass " + fmt(wm) + ", m2 " + fmt(w2) + ", entropy " + fmt(ws) +
             (pr.support_within_half ? "" : "; support left the trusted half-box"));
}

}  // namespace

int main() {
  check_mass_law();
  check_second_moment_and_detection();
  check_conditional_outcome();
  check_steady_fixed_point();
  check_vanishing();
  check_concentration();
  check_comparison();
  check_energy_inequality();
  check_gap_floor();
  check_infinite_time_proxy();
  check_cross_solver();

  std::stable_sort(gates.begin(), gates.end(),
                   [](const Gate& a, const Gate& b) { return a.id < b.id; });
  int failed = 0;
  for (const auto& g : gates) {
    std::printf("[%2d] %s  %s (%s)\n", g.id, g.pass ? "PASS" : "FAIL",
                g.label.c_str(), g.detail.c_str());
    if (!g.pass) ++failed;
  }
  std::printf("%zu checks, %d failed\n", gates.size(), failed);
  return failed == 0 ? 0 : 1;
}
