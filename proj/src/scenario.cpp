#include "nlks/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "nlks/checkpoint.hpp"
#include "nlks/errors.hpp"
#include "nlks/gauges.hpp"
#include "nlks/growth.hpp"
#include "nlks/planar.hpp"
#include "nlks/radial.hpp"
#include "nlks/steady.hpp"

namespace fs = std::filesystem;

namespace nlks {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// piecewise-linear cumulative profile from a CSV of "r,value" rows
std::function<double(double)> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open samples file " + path);
  std::vector<double> rs, Ms;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = true;
    for (char ch : line) {
      if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    }
    if (blank) continue;
    double r, M;
    if (std::sscanf(line.c_str(), "%lf , %lf", &r, &M) != 2 &&
        std::sscanf(line.c_str(), "%lf %lf", &r, &M) != 2) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected 'radius,cumulative'");
    }
    if (!rs.empty() && r <= rs.back()) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": radii must be strictly increasing");
    }
    rs.push_back(r);
    Ms.push_back(M);
  }
  if (rs.empty() || rs.front() != 0 || Ms.front() != 0) {
    throw validation_error(path + ": samples must start with the row 0,0");
  }
  return [rs = std::move(rs), Ms = std::move(Ms)](double r) {
    const auto it = std::upper_bound(rs.begin(), rs.end(), r);
    if (it == rs.begin()) return Ms.front();
    if (it == rs.end()) return Ms.back();
    const std::size_t i = static_cast<std::size_t>(it - rs.begin());
    const double f = (r - rs[i - 1]) / (rs[i] - rs[i - 1]);
    return Ms[i - 1] + f * (Ms[i] - Ms[i - 1]);
  };
}

std::function<double(double)> radial_profile(const ScenarioConfig& cfg) {
  using K = InitialConfig::Kind;
  const InitialConfig& ic = cfg.initial;
  switch (ic.kind) {
    case K::Steady: {
      const double lam = ic.peak_form ? peak_to_scale(ic.lambda)
                                      : ic.lambda;
      return [lam](double r) {
        const double s = r * r;
        return s / (s + lam);
      };
    }
    case K::ScaledSteady: {
      const double lam = ic.peak_form ? peak_to_scale(ic.lambda)
                                      : ic.lambda;
      const double head = ic.factor * 8 * pi_v / cfg.M0;
      const double tail =
          ic.tail_lambda > 0 ? ic.tail_lambda : cfg.s_max / 16;
      return [lam, head, tail](double r) {
        const double s = r * r;
        const double scaled = head * s / (s + lam);
        const double closure = s / (s + tail);
        return std::min(1.0, std::max(scaled, closure));
      };
    }
    case K::Gaussian: {
      const double two_sigma2 = 2 * ic.sigma * ic.sigma;
      return [two_sigma2](double r) { return -std::expm1(-r * r / two_sigma2); };
    }
    case K::Ramp: {
      const double s_max = cfg.s_max;
      return [s_max](double r) { return std::min(1.0, r * r / s_max); };
    }
    case K::CustomSamples:
      return load_samples(cfg.initial.samples_path);
  }
  throw validation_error("unhandled initial kind");
}

// observed-trend proxies over the last 80% of the observation span
void tail_trends(const std::vector<GaugeRecord>& recs, bool& entropy_up,
                 bool& hmr_down) {
  entropy_up = false;
  hmr_down = false;
  if (recs.size() < 3) return;
  const double t0 = recs.front().t, t1 = recs.back().t;
  std::vector<const GaugeRecord*> tail;
  for (const auto& r : recs) {
    if (r.t >= t0 + 0.2 * (t1 - t0)) tail.push_back(&r);
  }
  if (tail.size() < 3) return;
  entropy_up = true;
  hmr_down = true;
  for (std::size_t k = 0; k + 1 < tail.size(); ++k) {
    if (!(tail[k + 1]->entropy > tail[k]->entropy)) entropy_up = false;
    if (tail[k + 1]->half_mass_radius > tail[k]->half_mass_radius * (1 + 1e-12)) {
      hmr_down = false;
    }
  }
  if (!(tail.back()->half_mass_radius < tail.front()->half_mass_radius)) {
    hmr_down = false;
  }
}

void judge(ScenarioReport& rep, Regime regime) {
  const bool blewup = rep.observed.rfind("blowup", 0) == 0;
  const bool completed = rep.observed == "completed";
  switch (regime) {
    case Regime::FiniteTimeBlowup:
    case Regime::ConditionalFiniteBlowup: {
      if (!blewup) {
        rep.agree = false;
        rep.agreement_note = "collapse was predicted but the run " + rep.observed;
        return;
      }
      if (rep.analytic_blowup_time) {
        const double ts = *rep.analytic_blowup_time;
        if (rep.observed_time >= 0.5 * ts && rep.observed_time <= 3 * ts) {
          rep.agree = true;
          rep.agreement_note = "collapse detected at t = " + fmt(rep.observed_time) +
                               ", within the calibration band of the moment bound " +
                               fmt(ts);
        } else {
          rep.agree = false;
          rep.agreement_note = "collapse detected at t = " + fmt(rep.observed_time) +
                               ", outside [0.5, 3] x the moment bound " + fmt(ts);
        }
      } else {
        rep.agree = true;
        rep.agreement_note = "collapse detected (no analytic time: initial second "
                             "moment not supplied)";
      }
      return;
    }
    case Regime::GlobalExistence:
    case Regime::GlobalByComparison:
      rep.agree = completed;
      rep.agreement_note = completed
                               ? (rep.vanishing_final
                                      ? "ran to t_end; inner mass dispersed"
                                      : "ran to t_end with no collapse")
                               : "global existence predicted but the run " + rep.observed;
      return;
    case Regime::InfiniteTimeBlowup:
      rep.agree = completed && rep.entropy_tail_increasing &&
                  rep.half_mass_tail_decreasing;
      rep.agreement_note =
          rep.agree
              ? "no finite-time stop; entropy grows and the half-mass radius "
                "shrinks, the observable signature of slow concentration"
              : "expected growing entropy and shrinking half-mass radius while "
                "running to t_end";
      return;
    case Regime::OpenCritical:
      rep.agree = true;
      rep.agreement_note = "threshold case with no sharp prediction; observed: " +
                           rep.observed;
      return;
  }
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg, const std::string& out_root) {
  ScenarioReport rep;
  rep.name = cfg.name;
  rep.hash = config_hash(cfg);
  rep.solver = cfg.solver == ScenarioConfig::Solver::Radial ? "radial" : "planar";
  rep.M0 = cfg.M0;
  rep.m0 = cfg.m0;
  rep.m2_0 = cfg.m2_0;

  const GrowthParams p(cfg.M0, cfg.m0);
  const Classification cls = classify(p, cfg.m2_0);
  rep.predicted = regime_name(cls.regime);
  rep.predicted_note = cls.note;
  if (cfg.m2_0) rep.analytic_blowup_time = blowup_time(p, *cfg.m2_0);

  std::string dir;
  if (!out_root.empty()) {
    dir = (fs::path(out_root) / (cfg.name + "-" + rep.hash)).string();
    fs::create_directories(dir);
    if (cfg.snapshots) fs::create_directories(dir + "/snapshots");
    std::ofstream conf(dir + "/config.txt", std::ios::binary);
    conf << cfg.raw_text;
    rep.out_dir = dir;
  }

  std::vector<GaugeRecord> records;
  try {
    if (cfg.solver == ScenarioConfig::Solver::Radial) {
      SGrid grid = SGrid::geometric(cfg.grid_n, cfg.s_max, cfg.stretch);
      RadialState st = init_from_profile(std::move(grid), p, radial_profile(cfg));
      rep.initial_rescale = st.rescale;
      rep.initial_mass_deficit = st.mass_deficit;

      RunOptions opt;
      opt.t_end = cfg.t_end;
      opt.observe_every = cfg.observe_every;
      opt.dt_init = cfg.dt_init;
      opt.dt_max = cfg.dt_max;
      opt.blowup_density = cfg.blowup_density;
      opt.thresholds = cfg.thresholds;
      std::size_t snap = 0;
      if (!dir.empty() && cfg.snapshots) {
        opt.observer = [&dir, &snap](const RadialState& s, const GaugeRecord&) {
          char name[64];
          std::snprintf(name, sizeof name, "/snapshots/obs_%04zu.nlks", snap++);
          checkpoint_save(s, dir + name);
        };
      }

      RadialRun run_out = run(std::move(st), opt);
      records = run_out.records();
      rep.min_log_hls_gap = run_out.min_log_hls_gap;
      rep.observed_time = run_out.stop_time;
      switch (run_out.stop) {
        case StopReason::Completed: rep.observed = "completed"; break;
        case StopReason::BlowupDensity: rep.observed = "blowup(density_ceiling)"; break;
        case StopReason::BlowupDtUnderflow: rep.observed = "blowup(dt_underflow)"; break;
      }
      const RadialState& fin = run_out.final_state();
      rep.m2_truncation_estimate =
          second_moment_radial(fin).second * mass_at(p, fin.t);
      if (!dir.empty()) checkpoint_save(fin, dir + "/final.nlks");
    } else {
      PlanarDomain dom(cfg.grid_n, cfg.L);
      PlanarState st;
      st.p = p;
      const std::size_t n = cfg.grid_n;
      st.u.resize(n * n);
      if (cfg.initial.kind == InitialConfig::Kind::Gaussian) {
        const double s2 = cfg.initial.sigma * cfg.initial.sigma;
        const double amp = cfg.m0 / (2 * pi_v * s2);
        for (std::size_t j = 0; j < n; ++j) {
          const double y = dom.cell_center(j);
          for (std::size_t i = 0; i < n; ++i) {
            const double x = dom.cell_center(i);
            st.u[dom.idx(i, j)] = amp * std::exp(-(x * x + y * y) / (2 * s2));
          }
        }
      } else {  // steady family density, unit form
        const double lam = cfg.initial.peak_form
                               ? peak_to_scale(cfg.initial.lambda)
                               : cfg.initial.lambda;
        for (std::size_t j = 0; j < n; ++j) {
          const double y = dom.cell_center(j);
          for (std::size_t i = 0; i < n; ++i) {
            const double x = dom.cell_center(i);
            const double s = x * x + y * y;
            st.u[dom.idx(i, j)] = cfg.m0 * (lam / pi_v) / ((s + lam) * (s + lam));
          }
        }
      }
      const double raw_mass = planar_mass(dom, st.u);
      if (!(raw_mass > 0.5 * cfg.m0)) {
        throw validation_error(
            "initial data holds less than half of its mass inside the box; "
            "enlarge L");
      }
      rep.initial_mass_deficit = 1 - raw_mass / cfg.m0;
      rep.initial_rescale = cfg.m0 / raw_mass;
      for (double& v : st.u) v *= rep.initial_rescale;

      PlanarRunOptions opt;
      opt.t_end = cfg.t_end;
      opt.observe_every = cfg.observe_every;
      opt.dt_init = cfg.dt_init;
      opt.dt_max = cfg.dt_max;
      opt.blowup_density = cfg.blowup_density;
      opt.thresholds = cfg.thresholds;
      std::size_t snap = 0;
      if (!dir.empty() && cfg.snapshots) {
        const double L = cfg.L;
        opt.observer = [&dir, &snap, L](const PlanarState& s, const GaugeRecord&) {
          char name[64];
          std::snprintf(name, sizeof name, "/snapshots/obs_%04zu.nlks", snap++);
          checkpoint_save(s, L, dir + name);
        };
      }

      PlanarRun run_out = run2d(dom, std::move(st), opt);
      records = run_out.records();
      rep.min_log_hls_gap = run_out.min_log_hls_gap;
      rep.observed_time = run_out.stop_time;
      switch (run_out.stop) {
        case PlanarStop::Completed: rep.observed = "completed"; break;
        case PlanarStop::BlowupDensity: rep.observed = "blowup(density_ceiling)"; break;
        case PlanarStop::BlowupDtUnderflow:
          rep.observed = "blowup(dt_underflow)";
          break;
      }
      rep.support_within_half = run_out.support_within_half;
      if (!run_out.com_x.empty()) {
        const double x0 = run_out.com_x.front(), y0 = run_out.com_y.front();
        for (std::size_t k = 0; k < run_out.com_x.size(); ++k) {
          rep.com_drift = std::max(
              rep.com_drift, std::hypot(run_out.com_x[k] - x0, run_out.com_y[k] - y0));
        }
      }
      if (!dir.empty()) {
        checkpoint_save(run_out.final_state(), cfg.L, dir + "/final.nlks");
      }
    }
  } catch (const solver_error& e) {
    rep.observed = std::string("failed: ") + e.what();
    rep.agree = false;
    rep.agreement_note = "solver failure, no outcome to compare";
    if (!dir.empty()) {
      if (!records.empty()) write_gauge_csv(dir + "/gauges.csv", records);
      write_report(rep, dir + "/report.txt");
    }
    return rep;
  }

  if (!records.empty()) {
    rep.final_mass = records.back().mass;
    const double m_ref = mass_at(p, records.back().t);
    rep.final_mass_rel_err = std::abs(rep.final_mass - m_ref) / m_ref;
    rep.concentration_final = records.back().concentration_flag;
    rep.vanishing_final = records.back().vanishing_flag;
    for (const auto& r : records) {
      rep.max_boundary_current = std::max(rep.max_boundary_current, r.boundary_current);
    }
    tail_trends(records, rep.entropy_tail_increasing, rep.half_mass_tail_decreasing);
  }
  judge(rep, cls.regime);

  if (!dir.empty()) {
    write_gauge_csv(dir + "/gauges.csv", records);
    write_report(rep, dir + "/report.txt");
  }
  return rep;
}

// ---- report persistence -------------------------------------------------

std::string report_text(const ScenarioReport& rep) {
  std::ostringstream out;
  out << "name = " << rep.name << '\n'
      << "hash = " << rep.hash << '\n'
      << "solver = " << rep.solver << '\n'
      << "M0 = " << fmt(rep.M0) << '\n'
      << "m0 = " << fmt(rep.m0) << '\n'
      << "m2_0 = " << (rep.m2_0 ? fmt(*rep.m2_0) : "none") << '\n'
      << "predicted = " << rep.predicted << '\n'
      << "predicted_note = " << rep.predicted_note << '\n'
      << "analytic_blowup_time = "
      << (rep.analytic_blowup_time ? fmt(*rep.analytic_blowup_time) : "none") << '\n'
      << "observed = " << rep.observed << '\n'
      << "observed_time = " << fmt(rep.observed_time) << '\n'
      << "agree = " << (rep.agree ? "true" : "false") << '\n'
      << "agreement_note = " << rep.agreement_note << '\n'
      << "initial_rescale = " << fmt(rep.initial_rescale) << '\n'
      << "initial_mass_deficit = " << fmt(rep.initial_mass_deficit) << '\n'
      << "final_mass = " << fmt(rep.final_mass) << '\n'
      << "final_mass_rel_err = " << fmt(rep.final_mass_rel_err) << '\n'
      << "min_log_hls_gap = " << fmt(rep.min_log_hls_gap) << '\n'
      << "m2_truncation_estimate = " << fmt(rep.m2_truncation_estimate) << '\n'
      << "entropy_tail_increasing = " << (rep.entropy_tail_increasing ? "true" : "false")
      << '\n'
      << "half_mass_tail_decreasing = "
      << (rep.half_mass_tail_decreasing ? "true" : "false") << '\n'
      << "concentration_final = " << (rep.concentration_final ? "true" : "false") << '\n'
      << "vanishing_final = " << (rep.vanishing_final ? "true" : "false") << '\n'
      << "max_boundary_current = " << fmt(rep.max_boundary_current) << '\n'
      << "com_drift = " << fmt(rep.com_drift) << '\n'
      << "support_within_half = " << (rep.support_within_half ? "true" : "false")
      << '\n';
  return out.str();
}

void write_report(const ScenarioReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << report_text(rep);
  if (!out) throw io_error("failed writing " + path);
}

ScenarioReport read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open report " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  auto need = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw parse_error(path + ": missing key '" + key + "'");
    return it->second;
  };
  auto num = [&](const std::string& key) { return std::strtod(need(key).c_str(), nullptr); };
  auto flag = [&](const std::string& key) { return need(key) == "true"; };
  auto opt_num = [&](const std::string& key) -> std::optional<double> {
    const std::string v = need(key);
    if (v == "none") return std::nullopt;
    return std::strtod(v.c_str(), nullptr);
  };
  ScenarioReport rep;
  rep.name = need("name");
  rep.hash = need("hash");
  rep.solver = need("solver");
  rep.M0 = num("M0");
  rep.m0 = num("m0");
  rep.m2_0 = opt_num("m2_0");
  rep.predicted = need("predicted");
  rep.predicted_note = need("predicted_note");
  rep.analytic_blowup_time = opt_num("analytic_blowup_time");
  rep.observed = need("observed");
  rep.observed_time = num("observed_time");
  rep.agree = flag("agree");
  rep.agreement_note = need("agreement_note");
  rep.initial_rescale = num("initial_rescale");
  rep.initial_mass_deficit = num("initial_mass_deficit");
  rep.final_mass = num("final_mass");
  rep.final_mass_rel_err = num("final_mass_rel_err");
  rep.min_log_hls_gap = num("min_log_hls_gap");
  rep.m2_truncation_estimate = num("m2_truncation_estimate");
  rep.entropy_tail_increasing = flag("entropy_tail_increasing");
  rep.half_mass_tail_decreasing = flag("half_mass_tail_decreasing");
  rep.concentration_final = flag("concentration_final");
  rep.vanishing_final = flag("vanishing_final");
  rep.max_boundary_current = num("max_boundary_current");
  rep.com_drift = num("com_drift");
  rep.support_within_half = flag("support_within_half");
  return rep;
}

ReportTable report_table(const std::vector<ScenarioReport>& reports) {
  ReportTable out;
  const char* cols[] = {"name", "m0/8pi", "M0/8pi", "predicted", "observed", "agree"};
  std::vector<std::array<std::string, 6>> rows;
  for (const auto& r : reports) {
    char a[32], b[32];
    std::snprintf(a, sizeof a, "%.6g", r.m0 / (8 * pi_v));
    std::snprintf(b, sizeof b, "%.6g", r.M0 / (8 * pi_v));
    rows.push_back({r.name, a, b, r.predicted, r.observed, r.agree ? "yes" : "no"});
  }
  std::size_t width[6];
  for (int c = 0; c < 6; ++c) {
    width[c] = std::string(cols[c]).size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream text;
  auto emit = [&](const std::array<std::string, 6>& row) {
    for (int c = 0; c < 6; ++c) {
      text << row[c] << std::string(width[c] - row[c].size() + (c == 5 ? 0 : 2), ' ');
    }
    text << '\n';
  };
  emit({cols[0], cols[1], cols[2], cols[3], cols[4], cols[5]});
  std::size_t agreed = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    emit(rows[k]);
    if (reports[k].agree) ++agreed;
  }
  text << "agree: " << agreed << "/" << rows.size() << '\n';
  out.text = text.str();

  std::ostringstream csv;
  csv << "name,m0_over_8pi,M0_over_8pi,predicted,observed,agree\n";
  for (const auto& r : reports) {
    csv << r.name << ',' << fmt(r.m0 / (8 * pi_v)) << ',' << fmt(r.M0 / (8 * pi_v))
        << ',' << r.predicted << ',' << r.observed << ',' << (r.agree ? "yes" : "no")
        << '\n';
  }
  out.csv = csv.str();
  return out;
}

}  // namespace nlks
