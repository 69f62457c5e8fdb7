// Command-line front end: regime classification, scenario execution,
// steady-profile and envelope tabulation, and report aggregation.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlks/config.hpp"
#include "nlks/envelope.hpp"
#include "nlks/errors.hpp"
#include "nlks/growth.hpp"
#include "nlks/scenario.hpp"
#include "nlks/steady.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

double num(const std::string& text) { return nlks::parse_number_with_pi(text); }

void print_kv(const char* key, double v) {
  std::printf("%s = %.17g\n", key, v);
}

int do_classify(const std::string& M0s, const std::string& m0s,
                const std::string& m2s) {
  const nlks::GrowthParams p(num(M0s), num(m0s));
  std::optional<double> m2;
  if (!m2s.empty()) m2 = num(m2s);
  const nlks::Classification cls = nlks::classify(p, m2);
  std::printf("regime = %s\n", nlks::regime_name(cls.regime));
  std::printf("note = %s\n", cls.note.c_str());
  print_kv("M0_over_8pi", p.M0 / nlks::eight_pi);
  print_kv("m0_over_8pi", p.m0 / nlks::eight_pi);
  if (p.M0 < nlks::eight_pi && p.m0 > nlks::eight_pi &&
      !nlks::near_eight_pi(p.M0) && !nlks::near_eight_pi(p.m0)) {
    print_kv("critical_m2", nlks::critical_second_moment(p));
  }
  if (m2) {
    if (const auto t = nlks::blowup_time(p, *m2)) {
      print_kv("blowup_time_bound", *t);
    } else {
      std::printf("blowup_time_bound = none\n");
    }
  }
  return 0;
}

int do_simulate(const std::string& config_path, const std::string& out_dir) {
  const nlks::ScenarioConfig cfg = nlks::parse_config_file(config_path);
  const nlks::ScenarioReport rep = nlks::run_scenario(cfg, out_dir);
  std::fputs(nlks::report_text(rep).c_str(), stdout);
  if (rep.observed.rfind("failed", 0) == 0) return kExitSolver;
  return 0;
}

int do_steady(const std::string& lambda_s, const std::string& M0s,
              const std::string& emit, const std::string& form, double r_max,
              std::size_t samples) {
  const double lambda = num(lambda_s);
  const nlks::SteadyFamily fam(lambda, num(M0s), form == "unit");
  if (samples < 2) throw nlks::validation_error("need at least 2 samples");
  std::printf("r,%s\n", emit == "profile" ? "density" : "cumulative");
  for (std::size_t k = 0; k < samples; ++k) {
    const double r = r_max * static_cast<double>(k) /
                     static_cast<double>(samples - 1);
    const double v = emit == "profile" ? fam.density(r) : fam.cumulative(r);
    std::printf("%.17g,%.17g\n", r, v);
  }
  return 0;
}

int do_envelope(const std::string& kind, const std::string& M0s,
                const std::string& mu_s, const std::string& mu0_s,
                const std::string& mu1_s, const std::string& lambda0_s,
                const std::string& t_s, double r_max, std::size_t samples) {
  const double M0 = num(M0s);
  const double lambda0 = num(lambda0_s);
  const double t = num(t_s);
  if (samples < 2) throw nlks::validation_error("need at least 2 samples");
  if (kind == "super") {
    if (mu_s.empty()) throw nlks::validation_error("super envelope needs --mu");
    const nlks::SuperEnvelope env(M0, num(mu_s), lambda0);
    std::printf("# lambda_t = %.17g\n", env.lambda_at(t));
    std::printf("# cap_radius = %.17g\n", env.cap_radius(t));
    std::printf("r,value\n");
    for (std::size_t k = 0; k < samples; ++k) {
      const double r = r_max * static_cast<double>(k) /
                       static_cast<double>(samples - 1);
      std::printf("%.17g,%.17g\n", r, env.value(t, r));
    }
    return 0;
  }
  if (mu0_s.empty() || mu1_s.empty()) {
    throw nlks::validation_error("sub envelope needs --mu0 and --mu1");
  }
  const nlks::SubEnvelope env(M0, num(mu0_s), num(mu1_s), lambda0);
  std::printf("# lambda_t = %.17g\n", env.lambda_at(t));
  std::printf("# matching_radius_sq = %.17g\n", env.matching_radius_sq());
  std::printf("# shrink_rate = %.17g\n", env.shrink_rate());
  std::printf("# witness_radius = %.17g\n", env.witness_radius(t));
  std::printf("# witness_onset_time = %.17g\n", env.witness_onset_time());
  std::printf("r,value\n");
  for (std::size_t k = 0; k < samples; ++k) {
    const double r = r_max * static_cast<double>(k) /
                     static_cast<double>(samples - 1);
    std::printf("%.17g,%.17g\n", r, env.value(t, r));
  }
  return 0;
}

int do_report(const std::vector<std::string>& inputs, bool csv) {
  namespace fs = std::filesystem;
  std::vector<nlks::ScenarioReport> reports;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) p /= "report.txt";
    reports.push_back(nlks::read_report(p.string()));
  }
  const nlks::ReportTable table = nlks::report_table(reports);
  std::fputs((csv ? table.csv : table.text).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aggregation-diffusion with nonlocal logistic growth: "
               "solvers, diagnostics and scenario reports"};
  app.require_subcommand(1);

  std::string M0s, m0s, m2s;
  auto* cls = app.add_subcommand("classify", "regime of a parameter pair");
  cls->add_option("--M0", M0s, "carrying capacity (accepts a pi suffix, e.g. 8pi)")
      ->required();
  cls->add_option("--m0", m0s, "initial mass")->required();
  cls->add_option("--m2", m2s, "initial second moment (optional)");

  std::string config_path, out_dir;
  auto* sim = app.add_subcommand("simulate", "run a scenario config");
  sim->add_option("--config", config_path, "scenario document")->required();
  sim->add_option("--out", out_dir, "artifact root (per-scenario subdir inside)");

  std::string lambda_s = "1", emit, form = "unit";
  double r_max = 10;
  std::size_t samples = 256;
  auto* std_cmd = app.add_subcommand("steady", "tabulate a steady profile");
  std_cmd->add_option("--lambda", lambda_s, "scale parameter");
  std_cmd->add_option("--M0", M0s, "capacity used for normalization")->required();
  std_cmd->add_option("--emit", emit, "profile | cumulative")
      ->required()
      ->check(CLI::IsMember({"profile", "cumulative"}));
  std_cmd->add_option("--form", form, "unit | peak parameterization")
      ->check(CLI::IsMember({"unit", "peak"}));
  std_cmd->add_option("--r-max", r_max, "largest tabulated radius");
  std_cmd->add_option("--samples", samples, "number of rows");

  std::string kind, mu_s, mu0_s, mu1_s, lambda0_s = "1", t_s = "0";
  auto* env_cmd = app.add_subcommand("envelope", "tabulate a comparison envelope");
  env_cmd->add_option("--kind", kind, "super | sub")
      ->required()
      ->check(CLI::IsMember({"super", "sub"}));
  env_cmd->add_option("--M0", M0s, "capacity")->required();
  env_cmd->add_option("--mu", mu_s, "super amplitude");
  env_cmd->add_option("--mu0", mu0_s, "sub inner amplitude");
  env_cmd->add_option("--mu1", mu1_s, "sub outer amplitude");
  env_cmd->add_option("--lambda0", lambda0_s, "initial scale");
  env_cmd->add_option("--t", t_s, "evaluation time");
  env_cmd->add_option("--r-max", r_max, "largest tabulated radius");
  env_cmd->add_option("--samples", samples, "number of rows");

  std::vector<std::string> report_inputs;
  bool report_csv = false;
  auto* rep_cmd = app.add_subcommand("report", "tabulate scenario reports");
  rep_cmd->add_option("--in", report_inputs, "scenario dirs or report files")
      ->required()
      ->expected(-1);
  rep_cmd->add_flag("--csv", report_csv, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*cls) return do_classify(M0s, m0s, m2s);
    if (*sim) return do_simulate(config_path, out_dir);
    if (*std_cmd) return do_steady(lambda_s, M0s, emit, form, r_max, samples);
    if (*env_cmd) {
      return do_envelope(kind, M0s, mu_s, mu0_s, mu1_s, lambda0_s, t_s, r_max,
                         samples);
    }
    if (*rep_cmd) return do_report(report_inputs, report_csv);
  } catch (const nlks::validation_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const nlks::parse_error& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitValidation;
  } catch (const nlks::solver_error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const nlks::io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitSolver;
  }
  return 0;
}
