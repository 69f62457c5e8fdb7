// Scenario execution: build the configured initial state, run the selected
// solver, compare the observed outcome against the closed-form prediction,
// and persist config / gauge series / snapshots / report to a per-scenario
// directory named by the config hash.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlks/config.hpp"

namespace nlks {

struct ScenarioReport {
  std::string name;
  std::string hash;
  std::string solver;  // "radial" or "planar"
  double M0 = 0, m0 = 0;
  std::optional<double> m2_0;

  std::string predicted;  // regime name from the classifier
  std::string predicted_note;
  std::optional<double> analytic_blowup_time;

  // completed | blowup(density_ceiling) | blowup(dt_underflow) | failed: ...
  std::string observed;
  double observed_time = 0;
  bool agree = false;
  std::string agreement_note;

  double initial_rescale = 1;
  double initial_mass_deficit = 0;
  double final_mass = 0;
  double final_mass_rel_err = 0;
  double min_log_hls_gap = 0;
  double m2_truncation_estimate = 0;
  bool entropy_tail_increasing = false;
  bool half_mass_tail_decreasing = false;
  bool concentration_final = false;
  bool vanishing_final = false;
  double max_boundary_current = 0;   // planar only
  double com_drift = 0;              // planar only
  bool support_within_half = true;   // planar only

  std::string out_dir;  // empty when no artifacts were written
};

// Runs the scenario.  When out_root is nonempty, writes
//   <out_root>/<name>-<hash>/{config.txt, gauges.csv, report.txt, final.nlks}
// plus snapshots/obs_<k>.nlks at observation times when the config asks for
// snapshots.  Solver failures are reported as a failed outcome, not thrown.
ScenarioReport run_scenario(const ScenarioConfig& cfg,
                            const std::string& out_root = "");

// the report as the "key = value" document written to report.txt
std::string report_text(const ScenarioReport& rep);
void write_report(const ScenarioReport& rep, const std::string& path);
ScenarioReport read_report(const std::string& path);

struct ReportTable {
  std::string text;  // aligned, with a trailing agreement tally
  std::string csv;
};

ReportTable report_table(const std::vector<ScenarioReport>& reports);

}  // namespace nlks
