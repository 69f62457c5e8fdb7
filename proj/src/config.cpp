#include "nlks/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nlks/errors.hpp"
#include "nlks/growth.hpp"
#include "nlks/sgrid.hpp"

namespace nlks {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw parse_error("config line " + std::to_string(line) + ": " + what);
}

bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(line, "expected a boolean, got '" + v + "'");
}

std::uint64_t parse_u64(const std::string& v, std::size_t line) {
  try {
    std::size_t pos = 0;
    const std::uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    fail(line, "expected an unsigned integer, got '" + v + "'");
  }
}

}  // namespace

double parse_number_with_pi(const std::string& text) {
  const std::string v = trim(text);
  if (v.empty()) throw parse_error("empty numeric value");
  double mult = 1;
  std::string body = v;
  if (v.size() >= 2 && v.compare(v.size() - 2, 2, "pi") == 0) {
    mult = pi_v;
    body = trim(v.substr(0, v.size() - 2));
    if (body.empty()) return mult;  // bare "pi"
  }
  char* end = nullptr;
  const double out = std::strtod(body.c_str(), &end);
  if (end != body.c_str() + body.size() || body.empty()) {
    throw parse_error("malformed number '" + v + "'");
  }
  return out * mult;
}

namespace {

double parse_num(const std::string& v, std::size_t line) {
  try {
    return parse_number_with_pi(v);
  } catch (const parse_error& e) {
    fail(line, e.what());
  }
}

struct Entry {
  std::string value;
  std::size_t line;
};

using Section = std::map<std::string, Entry>;

void validate(ScenarioConfig& cfg);

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  std::map<std::string, Section> sections;
  std::string current;  // "" = top level
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  static const std::set<std::string> known_sections = {
      "growth", "initial", "grid", "time", "detectors", "run"};
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(current)) {
        fail(lineno, "unknown section [" + current + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (value.empty()) fail(lineno, "empty value for '" + key + "'");
    auto& sec = sections[current];
    if (sec.count(key)) fail(lineno, "duplicate key '" + key + "'");
    sec[key] = {value, lineno};
  }

  ScenarioConfig cfg;
  cfg.raw_text = text;

  // take(section, key) removes entries as they are consumed so leftovers
  // can be reported as unknown keys
  auto take = [&](const std::string& sec, const std::string& key) {
    std::optional<Entry> out;
    auto sit = sections.find(sec);
    if (sit != sections.end()) {
      auto kit = sit->second.find(key);
      if (kit != sit->second.end()) {
        out = kit->second;
        sit->second.erase(kit);
      }
    }
    return out;
  };

  if (auto e = take("", "name")) cfg.name = e->value;
  if (auto e = take("", "solver")) {
    if (e->value == "radial") {
      cfg.solver = ScenarioConfig::Solver::Radial;
    } else if (e->value == "planar") {
      cfg.solver = ScenarioConfig::Solver::Planar;
    } else {
      fail(e->line, "solver must be 'radial' or 'planar'");
    }
  }

  if (auto e = take("growth", "M0")) cfg.M0 = parse_num(e->value, e->line);
  if (auto e = take("growth", "m0")) cfg.m0 = parse_num(e->value, e->line);
  if (auto e = take("growth", "m2")) cfg.m2_0 = parse_num(e->value, e->line);

  if (auto e = take("initial", "kind")) {
    using K = InitialConfig::Kind;
    static const std::map<std::string, K> kinds = {
        {"steady", K::Steady},
        {"scaled_steady", K::ScaledSteady},
        {"gaussian", K::Gaussian},
        {"ramp", K::Ramp},
        {"custom_samples", K::CustomSamples}};
    const auto it = kinds.find(e->value);
    if (it == kinds.end()) fail(e->line, "unknown initial kind '" + e->value + "'");
    cfg.initial.kind = it->second;
  }
  if (auto e = take("initial", "lambda")) cfg.initial.lambda = parse_num(e->value, e->line);
  if (auto e = take("initial", "scale")) {
    if (e->value == "peak") {
      cfg.initial.peak_form = true;
    } else if (e->value == "unit") {
      cfg.initial.peak_form = false;
    } else {
      fail(e->line, "scale must be 'unit' or 'peak'");
    }
  }
  if (auto e = take("initial", "factor")) cfg.initial.factor = parse_num(e->value, e->line);
  if (auto e = take("initial", "tail_lambda")) {
    cfg.initial.tail_lambda = parse_num(e->value, e->line);
  }
  if (auto e = take("initial", "sigma")) cfg.initial.sigma = parse_num(e->value, e->line);
  if (auto e = take("initial", "m2")) cfg.initial.m2 = parse_num(e->value, e->line);
  if (auto e = take("initial", "mass")) {
    const double mass = parse_num(e->value, e->line);
    // the initial mass is fixed by [growth] m0; a mismatching value here is
    // a config inconsistency, not a knob
    if (cfg.m0 > 0 && std::abs(mass - cfg.m0) > 1e-9 * std::max(1.0, cfg.m0)) {
      fail(e->line, "initial mass must equal m0");
    }
  }
  if (auto e = take("initial", "path")) cfg.initial.samples_path = e->value;

  if (auto e = take("grid", "n")) {
    cfg.grid_n = static_cast<std::size_t>(parse_u64(e->value, e->line));
  }
  if (auto e = take("grid", "s_max")) cfg.s_max = parse_num(e->value, e->line);
  if (auto e = take("grid", "stretch")) cfg.stretch = parse_num(e->value, e->line);
  if (auto e = take("grid", "L")) cfg.L = parse_num(e->value, e->line);

  if (auto e = take("time", "t_end")) cfg.t_end = parse_num(e->value, e->line);
  if (auto e = take("time", "observe_every")) {
    cfg.observe_every = parse_num(e->value, e->line);
  }
  if (auto e = take("time", "dt_max")) cfg.dt_max = parse_num(e->value, e->line);
  if (auto e = take("time", "dt_init")) cfg.dt_init = parse_num(e->value, e->line);

  if (auto e = take("detectors", "concentration_fraction")) {
    cfg.thresholds.concentration_fraction = parse_num(e->value, e->line);
  }
  if (auto e = take("detectors", "concentration_radius")) {
    cfg.thresholds.concentration_radius = parse_num(e->value, e->line);
  }
  if (auto e = take("detectors", "vanishing_radius")) {
    cfg.thresholds.vanishing_radius = parse_num(e->value, e->line);
  }
  if (auto e = take("detectors", "vanishing_fraction")) {
    cfg.thresholds.vanishing_fraction = parse_num(e->value, e->line);
  }
  if (auto e = take("detectors", "density_floor")) {
    cfg.thresholds.density_floor = parse_num(e->value, e->line);
  }
  if (auto e = take("detectors", "blowup_density")) {
    cfg.blowup_density = parse_num(e->value, e->line);
  }

  if (auto e = take("run", "reproducible")) {
    cfg.reproducible = parse_bool(e->value, e->line);
  }
  if (auto e = take("run", "seed")) cfg.seed = parse_u64(e->value, e->line);
  if (auto e = take("run", "snapshots")) cfg.snapshots = parse_bool(e->value, e->line);

  for (const auto& [sec, entries] : sections) {
    for (const auto& [key, entry] : entries) {
      fail(entry.line, "unknown key '" + key + "'" +
                           (sec.empty() ? std::string(" at top level")
                                        : " in section [" + sec + "]"));
    }
  }

  validate(cfg);
  return cfg;
}

namespace {

void validate(ScenarioConfig& cfg) {
  if (cfg.name.empty()) throw validation_error("config needs a scenario name");
  for (char ch : cfg.name) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') {
      throw validation_error("scenario name may use letters, digits, '-' and '_'");
    }
  }
  GrowthParams p(cfg.M0, cfg.m0);  // validates positivity and finiteness
  if (!(cfg.t_end >= 0)) {
    throw validation_error("[time] t_end is required and must be nonnegative");
  }
  if (cfg.observe_every < 0) cfg.observe_every = cfg.t_end / 100;
  if (!(cfg.dt_max > 0)) throw validation_error("dt_max must be positive");
  if (cfg.dt_init < 0) throw validation_error("dt_init must be nonnegative");
  if (!(cfg.blowup_density > 0)) {
    throw validation_error("blowup_density must be positive");
  }
  const auto& th = cfg.thresholds;
  if (!std::isnan(th.concentration_fraction) &&
      (!(th.concentration_fraction > 0) || !(th.concentration_fraction < 1))) {
    throw validation_error("concentration_fraction must lie in (0, 1)");
  }
  if (!(th.concentration_radius > 0) || !(th.vanishing_radius > 0) ||
      !(th.vanishing_fraction > 0) || !(th.density_floor >= 0)) {
    throw validation_error("detector thresholds must be positive");
  }

  using K = InitialConfig::Kind;
  const bool m0_at_threshold = near_eight_pi(cfg.m0);
  const bool M0_at_threshold = near_eight_pi(cfg.M0);
  switch (cfg.initial.kind) {
    case K::Steady:
      if (!(cfg.initial.lambda > 0)) {
        throw validation_error("steady profile needs lambda > 0");
      }
      if (!M0_at_threshold) {
        throw validation_error(
            "the steady family carries total mass 8*pi/M0; it is a valid "
            "unit-mass profile only when M0 = 8*pi (use scaled_steady to "
            "build super/sub-threshold data)");
      }
      break;
    case K::ScaledSteady: {
      if (!(cfg.initial.lambda > 0) || !(cfg.initial.factor > 0)) {
        throw validation_error("scaled_steady needs lambda > 0 and factor > 0");
      }
      if (M0_at_threshold) {
        throw validation_error(
            "scaled_steady data certifies a regime only away from the "
            "threshold M0 = 8*pi");
      }
      if (cfg.initial.factor < 1 && cfg.M0 > 8 * pi_v) {
        throw validation_error(
            "scaled_steady with factor < 1 encodes strictly-below-threshold "
            "data, which requires M0 < 8*pi");
      }
      if (cfg.initial.factor >= 1 && cfg.M0 < 8 * pi_v) {
        throw validation_error(
            "scaled_steady with factor >= 1 encodes above-threshold data, "
            "which requires M0 > 8*pi");
      }
      break;
    }
    case K::Gaussian: {
      const bool has_sigma = cfg.initial.sigma > 0;
      const bool has_m2 = cfg.initial.m2 > 0;
      if (has_sigma == has_m2) {
        throw validation_error("gaussian data needs exactly one of sigma or m2");
      }
      if (has_m2) {
        cfg.initial.sigma = std::sqrt(cfg.initial.m2 / (2 * cfg.m0));
      }
      const double implied_m2 = 2 * cfg.initial.sigma * cfg.initial.sigma * cfg.m0;
      if (cfg.m2_0 &&
          std::abs(*cfg.m2_0 - implied_m2) > 1e-6 * std::max(1.0, implied_m2)) {
        throw validation_error(
            "[growth] m2 disagrees with the second moment implied by the "
            "gaussian profile");
      }
      if (!cfg.m2_0) cfg.m2_0 = implied_m2;
      break;
    }
    case K::Ramp:
      break;
    case K::CustomSamples:
      if (cfg.initial.samples_path.empty()) {
        throw validation_error("custom_samples needs a path");
      }
      break;
  }

  if (cfg.solver == ScenarioConfig::Solver::Radial) {
    SGrid::geometric(cfg.grid_n, cfg.s_max, cfg.stretch);  // eager grid check
    if (th.vanishing_radius * th.vanishing_radius > cfg.s_max) {
      throw validation_error("vanishing_radius lies beyond the radial domain");
    }
  } else {
    if (cfg.grid_n < 8 || (cfg.grid_n & (cfg.grid_n - 1)) != 0) {
      throw validation_error("planar grid n must be a power of two, at least 8");
    }
    if (!(cfg.L > 0) || !std::isfinite(cfg.L)) {
      throw validation_error("planar half-width L must be positive and finite");
    }
    if (cfg.initial.kind == K::Steady) {
      if (!m0_at_threshold) {
        throw validation_error(
            "a planar steady start needs m0 = 8*pi so the profile is a "
            "fixed point of the flow");
      }
    } else if (cfg.initial.kind != K::Gaussian) {
      throw validation_error(
          "the planar solver supports gaussian and steady initial data");
    }
  }
}

}  // namespace

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const parse_error& e) {
    throw parse_error(path + ": " + e.what());
  }
}

std::string config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : cfg.raw_text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  const std::uint32_t folded = static_cast<std::uint32_t>(h ^ (h >> 32));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", folded);
  return buf;
}

}  // namespace nlks
