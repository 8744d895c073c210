#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "hlab/heat_solver.hpp"
#include "hlab/inequality_report.hpp"
#include "hlab/model_manifolds.hpp"

namespace hlab {

// Round shrinking S^2 under the Kahler-Ricci flow d/dt g = -Ric, in the
// stereographic chart z with chart radius r = |z|.
struct RoundSpherePath {
  double rho0 = 1.0;
  std::vector<double> ts;
  double flow_residual = 0.0;  // max |d/dt g + R| over the sampled points

  double extinction() const { return 2.0 * rho0 * rho0; }
  double rho2(double t) const { return rho0 * rho0 - 0.5 * t; }
  double metric(double r, double t) const;         // g_{1 1bar}
  double ricci(double r) const;                    // R_{1 1bar}
  double scalar(double t) const { return 1.0 / (2.0 * rho2(t)); }  // g^{1 1bar} R_{1 1bar}
  double area(double t) const { return 4.0 * pi * rho2(t); }
  // Quadrature of g and of scalar * g over the chart plane.
  double area_by_quadrature(double t) const;
  double total_scalar_by_quadrature(double t) const;
};

RoundSpherePath evolve_round_flow(double rho0, std::span<const double> ts);

// Which trace is used for the reaction term: the complex trace g^{1 1bar} R_{1 1bar}
// (conserves mass) or the Riemannian scalar curvature 2 / rho^2 (does not).
enum class ScalarConvention { complex_trace, riemannian };

struct ConjugateSolveOptions {
  ScalarConvention convention = ScalarConvention::complex_trace;
  double mass_tolerance = 1e-5;  // relative
  bool enforce_mass = true;
};

// Positive solution of (d_t - Delta - scalar) u = 0 on the round path, with
// Delta = g^{1 1bar} d_z d_zbar. Nodes are geodesic angles theta on the unit
// sphere; chart radius r = tan(theta / 2).
struct ConjugateHeatField {
  double rho0 = 1.0;
  double h = 0.0;                 // spacing in theta
  std::vector<double> theta;
  std::vector<double> r;
  std::vector<double> ts;
  std::vector<std::vector<double>> u;
  std::vector<double> mass;       // int u dmu_t
  double initial_mass = 0.0;

  double max_mass_drift() const;  // relative
};

// Reduction: w = u / a(t) with a = (rho0^2 / rho^2)^m solves the unit-sphere
// heat equation in s = -(1/2) log(rho^2 / rho0^2). m = 1 for the complex trace.
ConjugateHeatField solve_forward_conjugate(const RoundSpherePath& path, std::span<const double> initial,
                                           int intervals, std::span<const double> ts,
                                           const ConjugateSolveOptions& options = {});

// Unit-mass geodesic Gaussian of Riemannian width `width` on the sphere of
// radius rho0, sampled on `intervals` theta cells.
std::vector<double> near_delta_data(double rho0, int intervals, double width);

struct LYHField {
  std::vector<double> ts;
  std::vector<double> r;        // chart radius
  std::vector<double> theta;
  std::vector<std::vector<double>> M;          // (log u)_{1 1bar} + g/t + R_{1 1bar}
  std::vector<std::vector<double>> M_over_g;   // invariant form
  double h = 0.0;
  double min_margin = 0.0;      // min of M / g
};

// M on the theta grid by centred differences; nodes with u below `floor`
// are skipped.
LYHField lyh_quantity(const ConjugateHeatField& field, const RoundSpherePath& path, double floor = 1e-300);

// Left side of the matrix estimate in complex dimension 1 at a given V:
// u_{zzbar} + u g / t + u R + 2 Re(u_z conj V) + u |V|^2.
double lyh_raw(double u, std::complex<double> u_z, double u_zzbar, double g, double R, double t,
               std::complex<double> V);

// Largest amount by which the raw left side at random V undercuts u * M, over
// all nodes and times. Non-positive means M is the minimum.
double lyh_v_optimality(const ConjugateHeatField& field, const RoundSpherePath& path, int samples,
                        std::uint64_t seed);

// Static surfaces: the Kahler metric is the conformal factor of a warped
// surface (n = 2), Delta_K = Delta / 4, so Kahler time t is Riemannian tau = t / 4.
inline double kahler_to_riemannian_time(double t) { return 0.25 * t; }

// margin = Delta_K log u + 1/t on a radial heat field of a static surface
// (field times are Riemannian tau).
InequalityReport lyh_check_static(const WarpedModel& surface, const HeatField& field, double tolerance,
                                  bool equality = false, double floor = 1e-300);

// Same quantity for a closed-form function on the flat chart, by 2D centred
// differences of log u with step h at the given points.
struct ChartPoint {
  double x = 0.0;
  double y = 0.0;
};
InequalityReport lyh_check_flat_chart(const std::function<double(double x, double y, double t)>& u,
                                      std::span<const ChartPoint> points, std::span<const double> ts,
                                      double h, double tolerance, bool equality = false);

// Flat Kahler heat kernel on C: (pi t)^{-1} exp(-|z|^2 / t).
double kahler_flat_kernel(double x, double y, double t);

void write_lyh_csv(std::ostream& out, const LYHField& field);

}  // namespace hlab
