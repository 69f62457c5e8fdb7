#include "nlks/gauges.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "nlks/errors.hpp"

namespace nlks {

namespace {

// t - log1p(t) without cancellation for small t
double t_minus_log1p(double t) {
  if (std::abs(t) < 1e-4) {
    return t * t * (0.5 + t * (-1.0 / 3.0 + t * 0.25));
  }
  return t - std::log1p(t);
}

struct RadialCells {
  std::size_t n = 0;                 // node count
  const std::vector<double>* s = nullptr;
  std::vector<double> dM, rho;       // per cell: mass increment, unit-mass density
};

RadialCells cells_of(const RadialState& st) {
  RadialCells c;
  c.n = st.grid.n();
  c.s = &st.grid.s;
  c.dM.resize(c.n - 1);
  c.rho.resize(c.n - 1);
  for (std::size_t i = 0; i + 1 < c.n; ++i) {
    c.dM[i] = st.M[i + 1] - st.M[i];
    c.rho[i] = c.dM[i] / (pi_v * st.grid.h(i));
  }
  return c;
}

}  // namespace

// ---- radial -------------------------------------------------------------

double entropy_radial(const RadialState& st, double density_floor) {
  const RadialCells c = cells_of(st);
  double S = 0;
  for (std::size_t i = 0; i + 1 < c.n; ++i) {
    if (c.rho[i] > density_floor) {
      S += c.rho[i] * std::log(c.rho[i]) * pi_v * st.grid.h(i);
    }
  }
  return S;
}

std::vector<double> potential_radial(const RadialState& st) {
  const std::size_t n = st.grid.n();
  const auto& s = st.grid.s;
  std::vector<double> w(n);
  w[n - 1] = -std::log(st.grid.s_max) / (4 * pi_v);
  for (std::size_t i = n - 1; i-- > 0;) {
    const double h = s[i + 1] - s[i];
    const double b = (st.M[i + 1] - st.M[i]) / h;
    double inc;
    if (i == 0) {
      inc = b * h / (4 * pi_v);  // M(sigma)/sigma is the constant b here
    } else {
      const double coef = st.M[i] - b * s[i];
      inc = (coef * std::log1p(h / s[i]) + b * h) / (4 * pi_v);
    }
    w[i] = w[i + 1] + inc;
  }
  return w;
}

double interaction_radial(const RadialState& st) {
  const std::size_t n = st.grid.n();
  const auto& s = st.grid.s;
  const std::vector<double> w = potential_radial(st);
  double I = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = s[i + 1] - s[i];
    const double dM = st.M[i + 1] - st.M[i];
    const double b = dM / h;
    // cell integral of w for the piecewise-linear cumulative profile
    double W = w[i + 1] * h + b * h * h / 2 / (4 * pi_v);
    if (i > 0) {
      const double coef = st.M[i] - b * s[i];
      W += coef * s[i] * t_minus_log1p(h / s[i]) / (4 * pi_v);
    }
    I += (dM / h) * W;
  }
  return I;
}

std::pair<double, double> second_moment_radial(const RadialState& st) {
  const std::size_t n = st.grid.n();
  const auto& s = st.grid.s;
  double m2 = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m2 += 0.5 * (s[i] + s[i + 1]) * (st.M[i + 1] - st.M[i]);
  }
  return {m2, st.grid.s_max * st.mass_deficit};
}

double dissipation_radial(const RadialState& st, double density_floor) {
  const RadialCells c = cells_of(st);
  const auto& s = st.grid.s;
  const double m = mass_at(st.p, st.t);
  double D = 0;
  for (std::size_t i = 1; i + 1 < c.n; ++i) {
    const double rho_l = c.rho[i - 1], rho_r = c.rho[i];
    if (rho_l <= density_floor || rho_r <= density_floor) continue;
    const double mid_l = 0.5 * (s[i - 1] + s[i]);
    const double mid_r = 0.5 * (s[i] + s[i + 1]);
    const double r = std::sqrt(s[i]);
    if (r == 0) continue;
    const double dlog_ds = (std::log(rho_r) - std::log(rho_l)) / (mid_r - mid_l);
    const double term = 2 * r * dlog_ds + m * st.M[i] / (2 * pi_v * r);
    D += std::sqrt(rho_l * rho_r) * term * term * pi_v * (mid_r - mid_l);
  }
  return D;
}

double log_hls_gap_radial(const RadialState& st) {
  const double m = mass_at(st.p, st.t);
  const double S = entropy_radial(st);
  const double I = interaction_radial(st);
  return m * (S - 4 * pi_v * I + 1 + std::log(pi_v));
}

double chemical_potential_spread_radial(const RadialState& st, double s_region,
                                        double density_floor) {
  const RadialCells c = cells_of(st);
  const auto& s = st.grid.s;
  const double m = mass_at(st.p, st.t);
  const std::vector<double> w = potential_radial(st);
  double lo = 0, hi = 0;
  bool any = false;
  for (std::size_t i = 0; i + 1 < c.n; ++i) {
    const double mid = 0.5 * (s[i] + s[i + 1]);
    if (mid > s_region) break;
    const double u = m * c.rho[i];
    if (u <= density_floor) continue;
    const double mu = std::log(u) - m * 0.5 * (w[i] + w[i + 1]);
    if (!any) {
      lo = hi = mu;
      any = true;
    } else {
      lo = std::min(lo, mu);
      hi = std::max(hi, mu);
    }
  }
  return any ? hi - lo : 0;
}

std::optional<double> detect_concentration(const RadialState& st, double fraction) {
  if (!(fraction > 0)) {
    throw validation_error("concentration threshold must be positive");
  }
  // thresholds >= 1 are unreachable for a cumulative fraction: stay silent
  // (the default 8*pi/M0 lands here whenever the capacity is subcritical)
  for (std::size_t i = 0; i < st.grid.n(); ++i) {
    if (st.M[i] > fraction) return std::sqrt(st.grid.s[i]);
  }
  return std::nullopt;
}

bool detect_vanishing(const RadialState& st, double R, double tol) {
  const double sR = R * R;
  if (sR > st.grid.s_max) {
    throw validation_error("vanishing probe radius lies beyond the domain");
  }
  const auto& s = st.grid.s;
  const auto it = std::upper_bound(s.begin(), s.end(), sR);
  if (it == s.begin()) return st.M.front() < tol;
  if (it == s.end()) return st.M.back() < tol;
  const std::size_t i = static_cast<std::size_t>(it - s.begin());
  const double f = (sR - s[i - 1]) / (s[i] - s[i - 1]);
  const double MR = st.M[i - 1] + f * (st.M[i] - st.M[i - 1]);
  return MR < tol;
}

double half_mass_radius_radial(const RadialState& st) {
  const auto& s = st.grid.s;
  const auto it = std::lower_bound(st.M.begin(), st.M.end(), 0.5);
  if (it == st.M.begin()) return 0;
  if (it == st.M.end()) return std::sqrt(st.grid.s_max);
  const std::size_t i = static_cast<std::size_t>(it - st.M.begin());
  const double dM = st.M[i] - st.M[i - 1];
  const double f = dM > 0 ? (0.5 - st.M[i - 1]) / dM : 0;
  return std::sqrt(s[i - 1] + f * (s[i] - s[i - 1]));
}

GaugeRecord radial_record(const RadialState& st, const GaugeThresholds& th) {
  GaugeRecord g;
  g.t = st.t;
  const double m = mass_at(st.p, st.t);
  const RadialCells c = cells_of(st);

  g.mass = m * st.M.back();
  g.m2 = m * second_moment_radial(st).first;

  double S_u = 0, S_rho = 0, max_rho = 0;
  for (std::size_t i = 0; i + 1 < c.n; ++i) {
    const double area = pi_v * st.grid.h(i);
    const double u = m * c.rho[i];
    if (u > th.density_floor) S_u += u * std::log(u) * area;
    if (c.rho[i] > th.density_floor) S_rho += c.rho[i] * std::log(c.rho[i]) * area;
    max_rho = std::max(max_rho, c.rho[i]);
  }
  const double I_rho = interaction_radial(st);
  g.entropy = S_u;
  g.interaction = m * m * I_rho;
  g.free_energy = g.entropy / g.mass - g.interaction / (2 * g.mass) - std::log(g.mass);
  g.free_energy_rho = S_rho - (m / 2) * I_rho;
  g.dissipation = dissipation_radial(st, th.density_floor);
  g.max_density = m * max_rho;
  g.half_mass_radius = half_mass_radius_radial(st);
  g.boundary_current = 0;

  const double fraction =
      std::isnan(th.concentration_fraction) ? 8 * pi_v / st.p.M0
                                            : th.concentration_fraction;
  const auto radius = detect_concentration(st, fraction);
  g.concentration_flag = radius.has_value() && *radius <= th.concentration_radius;
  const double probe = std::min(th.vanishing_radius,
                                std::sqrt(st.grid.s_max));
  g.vanishing_flag = detect_vanishing(st, probe, th.vanishing_fraction);
  return g;
}

// ---- planar -------------------------------------------------------------

double planar_mass(const PlanarDomain& dom, const std::vector<double>& u) {
  double sum = 0;
  for (double v : u) sum += v;
  return sum * dom.h() * dom.h();
}

double entropy_planar(const PlanarDomain& dom, const std::vector<double>& u,
                      double density_floor) {
  const double cell = dom.h() * dom.h();
  double S = 0;
  for (double v : u) {
    if (v > density_floor) S += v * std::log(v) * cell;
  }
  return S;
}

double interaction_planar(const PlanarDomain& dom, const std::vector<double>& u,
                          const std::vector<double>& c) {
  const double cell = dom.h() * dom.h();
  double I = 0;
  for (std::size_t k = 0; k < u.size(); ++k) I += u[k] * c[k];
  return I * cell;
}

double second_moment_planar(const PlanarDomain& dom, const std::vector<double>& u) {
  const std::size_t n = dom.n();
  const double cell = dom.h() * dom.h();
  double m2 = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = dom.cell_center(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = dom.cell_center(i);
      m2 += (x * x + y * y) * u[dom.idx(i, j)];
    }
  }
  return m2 * cell;
}

double dissipation_planar(const PlanarDomain& dom, const std::vector<double>& u,
                          const std::vector<double>& c, double density_floor) {
  const std::size_t n = dom.n();
  const double h = dom.h();
  const double m = planar_mass(dom, u);
  if (!(m > 0)) return 0;
  double D = 0;
  auto face = [&](std::size_t a, std::size_t b) {
    const double ua = u[a], ub = u[b];
    if (ua <= density_floor || ub <= density_floor) return;
    const double diff = (std::log(ub) - std::log(ua) - (c[b] - c[a])) / h;
    D += std::sqrt(ua * ub) * diff * diff;
  };
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i + 1 < n; ++i) face(dom.idx(i, j), dom.idx(i + 1, j));
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) face(dom.idx(i, j), dom.idx(i, j + 1));
  }
  return D * h * h / m;
}

double log_hls_gap_from(double S, double I, double M) {
  if (!(M > 0)) return 0;
  return S - 4 * pi_v * I / M - M * (std::log(M) - 1 - std::log(pi_v));
}

double log_hls_gap_planar(const PlanarDomain& dom, const std::vector<double>& u,
                          const std::vector<double>& c) {
  const double M = planar_mass(dom, u);
  return log_hls_gap_from(entropy_planar(dom, u), interaction_planar(dom, u, c), M);
}

double chemical_potential_spread_planar(const PlanarDomain& dom,
                                        const std::vector<double>& u,
                                        const std::vector<double>& c,
                                        double region_half_width, double floor_rel) {
  const std::size_t n = dom.n();
  double umax = 0;
  for (double v : u) umax = std::max(umax, v);
  const double floor_abs = floor_rel * umax;
  double lo = 0, hi = 0;
  bool any = false;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = dom.cell_center(j);
    if (std::abs(y) > region_half_width) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = dom.cell_center(i);
      if (std::abs(x) > region_half_width) continue;
      const double v = u[dom.idx(i, j)];
      if (v <= floor_abs) continue;
      const double mu = std::log(v) - c[dom.idx(i, j)];
      if (!any) {
        lo = hi = mu;
        any = true;
      } else {
        lo = std::min(lo, mu);
        hi = std::max(hi, mu);
      }
    }
  }
  return any ? hi - lo : 0;
}

std::pair<double, double> center_of_mass(const PlanarDomain& dom,
                                         const std::vector<double>& u) {
  const std::size_t n = dom.n();
  double sx = 0, sy = 0, sm = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = dom.cell_center(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = u[dom.idx(i, j)];
      sm += v;
      sx += dom.cell_center(i) * v;
      sy += y * v;
    }
  }
  if (sm == 0) return {0, 0};
  return {sx / sm, sy / sm};
}

double support_radius(const PlanarDomain& dom, const std::vector<double>& u,
                      double floor_rel) {
  const std::size_t n = dom.n();
  double umax = 0;
  for (double v : u) umax = std::max(umax, v);
  const double floor_abs = floor_rel * umax;
  double r2max = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = dom.cell_center(j);
    for (std::size_t i = 0; i < n; ++i) {
      if (u[dom.idx(i, j)] > floor_abs) {
        const double x = dom.cell_center(i);
        r2max = std::max(r2max, x * x + y * y);
      }
    }
  }
  return std::sqrt(r2max);
}

namespace {

// cells sorted by radius with their cumulative mass
struct RadialOrder {
  std::vector<double> r;    // sorted cell radii
  std::vector<double> cum;  // cumulative mass up to and including that cell
};

RadialOrder radial_order(const PlanarDomain& dom, const std::vector<double>& u) {
  const std::size_t n = dom.n();
  std::vector<std::pair<double, double>> cells(n * n);
  const double cell = dom.h() * dom.h();
  for (std::size_t j = 0; j < n; ++j) {
    const double y = dom.cell_center(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = dom.cell_center(i);
      cells[dom.idx(i, j)] = {std::sqrt(x * x + y * y), u[dom.idx(i, j)] * cell};
    }
  }
  std::sort(cells.begin(), cells.end());
  RadialOrder out;
  out.r.resize(cells.size());
  out.cum.resize(cells.size());
  double acc = 0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    acc += cells[k].second;
    out.r[k] = cells[k].first;
    out.cum[k] = acc;
  }
  return out;
}

}  // namespace

double half_mass_radius_planar(const PlanarDomain& dom, const std::vector<double>& u) {
  const RadialOrder ord = radial_order(dom, u);
  if (ord.cum.empty() || ord.cum.back() <= 0) return 0;
  const double target = 0.5 * ord.cum.back();
  const auto it = std::lower_bound(ord.cum.begin(), ord.cum.end(), target);
  return ord.r[static_cast<std::size_t>(it - ord.cum.begin())];
}

double boundary_current(const PlanarDomain& dom, const std::vector<double>& u,
                        const FaceVelocities& v) {
  const std::size_t n = dom.n();
  const double h = dom.h();
  double total = 0;
  auto flux = [&](double vf, std::size_t up, std::size_t dn) {
    const double adv = vf * (vf > 0 ? u[up] : u[dn]);
    const double dif = -(u[dn] - u[up]) / h;
    total += std::abs(adv + dif) * h;
  };
  for (std::size_t j = 0; j < n; ++j) {
    flux(v.fx(1, j), dom.idx(0, j), dom.idx(1, j));
    flux(v.fx(n - 1, j), dom.idx(n - 2, j), dom.idx(n - 1, j));
  }
  for (std::size_t i = 0; i < n; ++i) {
    flux(v.fy(i, 1), dom.idx(i, 0), dom.idx(i, 1));
    flux(v.fy(i, n - 1), dom.idx(i, n - 2), dom.idx(i, n - 1));
  }
  return total;
}

GaugeRecord planar_record(const PlanarDomain& dom, const PlanarState& st,
                          const std::vector<double>& c, const FaceVelocities& v,
                          const GaugeThresholds& th) {
  GaugeRecord g;
  g.t = st.t;
  const double m = planar_mass(dom, st.u);
  g.mass = m;
  g.m2 = second_moment_planar(dom, st.u);
  g.entropy = entropy_planar(dom, st.u, th.density_floor);
  g.interaction = interaction_planar(dom, st.u, c);
  if (m > 0) {
    g.free_energy = g.entropy / g.mass - g.interaction / (2 * g.mass) - std::log(g.mass);
    // independent route through the unit-mass profile rho = u/m, w = c/m
    const double cell = dom.h() * dom.h();
    double S_rho = 0, I_rho = 0;
    for (std::size_t k = 0; k < st.u.size(); ++k) {
      const double rho = st.u[k] / m;
      if (rho > th.density_floor) S_rho += rho * std::log(rho) * cell;
      I_rho += rho * (c[k] / m) * cell;
    }
    g.free_energy_rho = S_rho - (m / 2) * I_rho;
  }
  g.dissipation = dissipation_planar(dom, st.u, c, th.density_floor);
  double umax = 0;
  for (double w : st.u) umax = std::max(umax, w);
  g.max_density = umax;
  g.half_mass_radius = half_mass_radius_planar(dom, st.u);
  g.boundary_current = boundary_current(dom, st.u, v);

  const double fraction =
      std::isnan(th.concentration_fraction) ? 8 * pi_v / st.p.M0
                                            : th.concentration_fraction;
  const RadialOrder ord = radial_order(dom, st.u);
  if (m > 0) {
    const double target_c = fraction * m;
    const auto it = std::upper_bound(ord.cum.begin(), ord.cum.end(), target_c);
    if (it != ord.cum.end()) {
      const double r = ord.r[static_cast<std::size_t>(it - ord.cum.begin())];
      g.concentration_flag = r <= th.concentration_radius;
    }
    // mass strictly inside the probe radius
    double inner = 0;
    const auto rit = std::lower_bound(ord.r.begin(), ord.r.end(), th.vanishing_radius);
    if (rit != ord.r.begin()) {
      inner = ord.cum[static_cast<std::size_t>(rit - ord.r.begin()) - 1];
    }
    g.vanishing_flag = inner < th.vanishing_fraction * m;
  }
  return g;
}

// ---- CSV ----------------------------------------------------------------

std::string gauge_csv_header() {
  return "t,mass,m2,entropy,interaction,F_u,F_rho,dissipation,max_density,"
         "half_mass_radius,boundary_current,flags";
}

std::string gauge_csv_row(const GaugeRecord& g) {
  char buf[512];
  std::string flags;
  if (g.concentration_flag) flags += 'c';
  if (g.vanishing_flag) flags += 'v';
  if (flags.empty()) flags = "-";
  std::snprintf(buf, sizeof buf,
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s",
                g.t, g.mass, g.m2, g.entropy, g.interaction, g.free_energy,
                g.free_energy_rho, g.dissipation, g.max_density, g.half_mass_radius,
                g.boundary_current, flags.c_str());
  return buf;
}

void write_gauge_csv(const std::string& path, const std::vector<GaugeRecord>& records) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-identical newlines
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << gauge_csv_header() << '\n';
  for (const auto& g : records) out << gauge_csv_row(g) << '\n';
  if (!out) throw io_error("failed writing " + path);
}

std::vector<GaugeRecord> read_gauge_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != gauge_csv_header()) {
    throw parse_error(path + ": unexpected gauge CSV header");
  }
  std::vector<GaugeRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    double vals[11];
    for (int k = 0; k < 11; ++k) {
      if (!std::getline(ss, field, ',')) {
        throw parse_error(path + ":" + std::to_string(lineno) + ": short row");
      }
      char* end = nullptr;
      vals[k] = std::strtod(field.c_str(), &end);
      if (end == field.c_str()) {
        throw parse_error(path + ":" + std::to_string(lineno) + ": bad number '" +
                          field + "'");
      }
    }
    if (!std::getline(ss, field, ',')) {
      throw parse_error(path + ":" + std::to_string(lineno) + ": missing flags");
    }
    GaugeRecord g;
    g.t = vals[0];
    g.mass = vals[1];
    g.m2 = vals[2];
    g.entropy = vals[3];
    g.interaction = vals[4];
    g.free_energy = vals[5];
    g.free_energy_rho = vals[6];
    g.dissipation = vals[7];
    g.max_density = vals[8];
    g.half_mass_radius = vals[9];
    g.boundary_current = vals[10];
    g.concentration_flag = field.find('c') != std::string::npos;
    g.vanishing_flag = field.find('v') != std::string::npos;
    out.push_back(g);
  }
  return out;
}

}  // namespace nlks
