// Scalar diagnostics: moments, entropy, interaction energy, free energy,
// dissipation, the logarithmic HLS gap, the chemical-potential spread, and
// the concentration / vanishing detectors.
//
// Radial quantities are assembled from the piecewise description the solver
// actually evolves: the density is piecewise constant on cells (rho =
// (1/pi) dM/ds), so the entropy and second-moment sums are exact integrals
// of that piecewise density, and the potential w is integrated cell by cell
// in closed form from w'(r) = -M(r)/(2 pi r) with the far-field anchor
// w(r_max) = -log(r_max)/(2 pi).  With every integral exact for the
// discrete profile, inequalities such as the log-HLS lower bound hold for
// the computed numbers up to roundoff, not up to quadrature error.
#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "nlks/gauge_record.hpp"
#include "nlks/planar.hpp"
#include "nlks/radial.hpp"

namespace nlks {

// ---- radial -------------------------------------------------------------

// entropy of the unit-mass profile: integral of rho log rho
double entropy_radial(const RadialState& st, double density_floor = 1e-14);
// interaction of the unit-mass profile: integral of rho * w
double interaction_radial(const RadialState& st);
// second moment of the unit-mass profile plus a truncation-remainder
// estimate s_max * mass_deficit (steady tails carry mass beyond any box)
std::pair<double, double> second_moment_radial(const RadialState& st);
// node potentials w (unit mass), same length as the grid
std::vector<double> potential_radial(const RadialState& st);
// integral of rho |grad log rho - m grad w|^2 over cells above the floor
double dissipation_radial(const RadialState& st, double density_floor = 1e-14);
// gap of the physical density in the logarithmic HLS inequality;
// nonnegative up to roundoff for every representable state
double log_hls_gap_radial(const RadialState& st);
// max - min of log u - c over cells with s below s_region and density
// above the floor
double chemical_potential_spread_radial(const RadialState& st, double s_region,
                                        double density_floor = 1e-10);
// smallest node radius enclosing more than `fraction` of the mass
std::optional<double> detect_concentration(const RadialState& st, double fraction);
// true when the mass fraction inside radius R is below tol
bool detect_vanishing(const RadialState& st, double R, double tol);
double half_mass_radius_radial(const RadialState& st);
GaugeRecord radial_record(const RadialState& st, const GaugeThresholds& th);

// ---- planar -------------------------------------------------------------

double entropy_planar(const PlanarDomain& dom, const std::vector<double>& u,
                      double density_floor = 1e-14);
// integral of u * c for the given potential
double interaction_planar(const PlanarDomain& dom, const std::vector<double>& u,
                          const std::vector<double>& c);
double second_moment_planar(const PlanarDomain& dom, const std::vector<double>& u);
double dissipation_planar(const PlanarDomain& dom, const std::vector<double>& u,
                          const std::vector<double>& c, double density_floor = 1e-14);
double log_hls_gap_planar(const PlanarDomain& dom, const std::vector<double>& u,
                          const std::vector<double>& c);
// max - min of log u - c over cells with |x|,|y| <= region_half_width and
// density above floor_rel * max(u)
double chemical_potential_spread_planar(const PlanarDomain& dom,
                                        const std::vector<double>& u,
                                        const std::vector<double>& c,
                                        double region_half_width,
                                        double floor_rel = 1e-12);
std::pair<double, double> center_of_mass(const PlanarDomain& dom,
                                         const std::vector<double>& u);
// radius (about the origin) of the farthest cell with u > floor_rel * max u
double support_radius(const PlanarDomain& dom, const std::vector<double>& u,
                      double floor_rel = 1e-8);
double half_mass_radius_planar(const PlanarDomain& dom, const std::vector<double>& u);
// total |mass flux| across the ring of faces one cell inside the wall
double boundary_current(const PlanarDomain& dom, const std::vector<double>& u,
                        const FaceVelocities& v);
GaugeRecord planar_record(const PlanarDomain& dom, const PlanarState& st,
                          const std::vector<double>& c, const FaceVelocities& v,
                          const GaugeThresholds& th);

// gap in the logarithmic HLS inequality from already-computed integrals of
// a density f with mass M: S = integral of f log f, I = integral of f * c_f.
double log_hls_gap_from(double S, double I, double M);

}  // namespace nlks
