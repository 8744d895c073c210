#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlab/inequality_report.hpp"
#include "hlab/model_manifolds.hpp"

namespace hlab {

using Vec = std::vector<double>;

// Curves are described in normal coordinates about the pole (points of R^n,
// |x| = pole distance) and parametrised by sigma = 2 sqrt(tau).
struct CurveJet {
  Vec x;
  Vec dx;   // d/dsigma
  Vec ddx;  // d^2/dsigma^2
};
using SigmaCurve = std::function<CurveJet(double sigma)>;

// Jets of a position map by centred differences with the given step.
SigmaCurve jets_by_differences(std::function<Vec(double sigma)> position, double step);

struct LGeodesicPath {
  Vec v;                 // initial velocity lim dgamma/dsigma at the pole
  double speed = 0.0;    // |v|
  double tau_bar = 0.0;
  double sigma_bar = 0.0;
  std::vector<double> sigma;
  std::vector<double> tau;       // sigma^2 / 4
  std::vector<double> arc;       // unfolded arc length |v| sigma
  std::vector<double> radius;    // pole distance of gamma(sigma)
  std::vector<double> speed_tau; // |dgamma/dtau| = |v| / sqrt(tau)
  std::vector<double> jacobian;  // J(sigma)
  double L = 0.0;
  double ell = 0.0;              // L / (2 sqrt(tau_bar))
  double conjugate_sigma = 0.0;  // first zero of J, +inf if none
  bool conjugate_before = false; // conjugate point in (0, sigma_bar]
  bool minimizing = true;

  // Endpoint in normal coordinates (folded through the antipode on spheres).
  Vec endpoint() const;
  // Exact jets of the radial line sigma -> sigma v (valid inside the chart).
  SigmaCurve curve() const;
};

// L-length int_0^tau_bar sqrt(tau) |gamma'(tau)|^2 dtau of a sampled curve,
// evaluated as the sigma-energy int |dgamma/dsigma|^2 dsigma of the
// piecewise-linear-in-sigma interpolant (metric frozen at segment midpoints).
double l_length(const WarpedModel& model, std::span<const double> taus, std::span<const Vec> points);
// Same for a curve given as tau -> point, resampled uniformly in sigma.
double l_length(const WarpedModel& model, const std::function<Vec(double tau)>& curve, double tau_bar,
                int segments = 4096);

LGeodesicPath l_exp(const WarpedModel& model, const Vec& v, double tau_bar, int samples = 256);

struct FirstVariation {
  double boundary = 0.0;  // 2 <Y, dgamma/dsigma>(sigma_bar) = 2 sqrt(tau_bar) <Y, X>(tau_bar)
  double interior = 0.0;  // 2 int <nabla_sigma dgamma/dsigma, Y> dsigma
  double pairing = 0.0;   // boundary - interior
};

// Y(sigma) is given in the orthonormal polar frame at gamma(sigma): its
// component along x/|x| is radial, the rest is tangential with physical length.
using TestField = std::function<Vec(double sigma)>;

FirstVariation first_variation_residual(const WarpedModel& model, const SigmaCurve& curve,
                                        double sigma_bar, const TestField& field,
                                        int intervals = 2000);
FirstVariation first_variation_residual(const WarpedModel& model, const LGeodesicPath& path,
                                        const TestField& field, int intervals = 2000);

// Jacobian of v -> L exp_v(tau) with sigma = 2 sqrt(tau):
// J = sigma (phi(|v| sigma) / |v|)^{n-1}, and sigma^n at v = 0.
double jacobian_at(const WarpedModel& model, double speed, double sigma);

struct JacobianTrack {
  std::vector<double> sigma;
  std::vector<double> J;
  double conjugate_sigma = 0.0;  // +inf if no zero of phi along the ray
};
JacobianTrack jacobian_along(const WarpedModel& model, double speed, double tau_bar, int samples = 256);

// First sign change of phi along a radial ray, +inf if none within reach.
double first_conjugate_arc(const WarpedModel& model);

struct DirectionThreshold {
  Vec direction;
  double d_max = 0.0;          // no conjugate point for |v| < d_max
  double c_max = 0.0;          // minimising for |v| <= c_max
  bool chart_limited = false;  // threshold is the edge of the model, not geometry
};

struct MinimalitySets {
  double sigma_bar = 0.0;
  std::vector<DirectionThreshold> entries;
};

MinimalitySets minimality_sets(const WarpedModel& model, double sigma_bar, std::span<const Vec> directions);
MinimalitySets minimality_sets(const FlatCylinder& cyl, double sigma_bar, std::span<const Vec> directions);

struct ReducedDistance {
  double ell = 0.0;          // from the shot path's L-length
  double ell_formula = 0.0;  // d(pole, y)^2 / (4 tau_bar)
  double speed = 0.0;        // |v| of the minimising shot
  int iterations = 0;
};

// y is given by its pole distance (rotational symmetry).
ReducedDistance reduced_distance(const WarpedModel& model, double r, double tau_bar);
// Base point (angle 0, flat origin).
ReducedDistance reduced_distance(const FlatCylinder& cyl, const CylinderPoint& y, double tau_bar);

// int_0^tau_bar tau^{3/2} Ric(X, X) dtau along the radial L-geodesic with
// initial speed `speed`.
double ricci_integral(const WarpedModel& model, double speed, double tau_bar);

struct IdentityResidual {
  double r = 0.0;
  double gradient = 0.0;        // | tau |grad ell|^2 - ell |
  double gradient_ratio = 0.0;  // tau |grad ell|^2 / ell
  double time = 0.0;            // | tau ell_tau + ell |
  double time_ratio = 0.0;      // tau ell_tau / ell
  double laplacian = 0.0;       // Delta ell by centred differences
  double slack = 0.0;           // n/(2 tau) - tau^{-3/2} I - Delta ell
  double slack_alt = 0.0;       // same with tau^{-1} I
};

std::vector<IdentityResidual> identity_residuals(const WarpedModel& model, std::span<const double> rs,
                                                 double tau_bar, double delta = 1e-3);

struct IntegrandCheck {
  InequalityReport monotone;       // -d/dtau [e^{-ell} (4 pi tau)^{-n/2} J]
  InequalityReport log_jacobian;   // bound - d/dtau log J, tau^{-3/2} normalisation
  InequalityReport log_jacobian_alt;  // tau^{-1} normalisation
  InequalityReport ell_constant;   // -|d ell / dtau| along the geodesic
  bool conjugate_near_boundary = false;
};

IntegrandCheck integrand_derivative_check(const WarpedModel& model, double speed,
                                          std::span<const double> taus, double tolerance = 1e-6,
                                          double delta = 1e-5);

struct SectorRegion {
  Vec direction;
  double half_angle = pi;
  double v_min = 0.0;
  double v_max = std::numeric_limits<double>::infinity();

  void validate(int n) const;
};

// Area of the geodesic cap of angular radius alpha in the unit (n-1)-sphere.
double cap_area(int n, double alpha);

struct ReducedVolumeSeries {
  std::vector<double> taus;
  std::vector<double> V_tangent;
  std::vector<double> V_manifold;  // NaN for sector series
  std::vector<double> gap;
  std::optional<SectorRegion> sector;
  std::string method;

  double max_forward_difference() const;
  double max_gap() const;
};

ReducedVolumeSeries reduced_volume(const WarpedModel& model, std::span<const double> taus,
                                   const std::optional<SectorRegion>& sector = std::nullopt,
                                   int intervals = 4000);
ReducedVolumeSeries reduced_volume(const FlatCylinder& cyl, std::span<const double> taus,
                                   int intervals = 4000);

void write_reduced_volume_csv(std::ostream& out, const ReducedVolumeSeries& series);

}  // namespace hlab
