#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "hlab/inequality_report.hpp"
#include "hlab/model_manifolds.hpp"

namespace hlab {

// Graph {w = P(z)} in C^2 with the induced metric lambda |dz|^2.
struct GraphCurve {
  enum class Kind { monomial, exponential };  // z^d, or exp(z) - 1
  Kind kind = Kind::monomial;
  int degree = 1;

  static GraphCurve monomial(int d);
  static GraphCurve exponential();

  std::complex<double> P(std::complex<double> z) const;
  std::complex<double> dP(std::complex<double> z) const;
  bool radial() const { return kind == Kind::monomial; }
};

inline constexpr int ambient_dimension = 2;  // m
inline constexpr int curve_dimension = 1;    // s

// lambda(z) = 1 + |P'(z)|^2.
std::function<double(std::complex<double>)> induced_graph_metric(const GraphCurve& curve);

// Monomial graphs as warped surfaces: geodesic radius rho(x) = int_0^x sqrt(lambda),
// phi = x sqrt(lambda(x)), tabulated up to geodesic radius rho_max.
WarpedModel graph_surface(const GraphCurve& curve, double rho_max, int rows = 4000);

struct HeatComparison {
  std::vector<double> ts;
  std::vector<double> K;       // intrinsic on-diagonal kernel K(0, 0, t)
  std::vector<double> scaled;  // pi t K
  InequalityReport report;     // margin = (pi t)^{m-s} H(0,0,t) - K = (pi t)^{-1} - K
};

struct HeatComparisonOptions {
  int intervals = 2000;       // radial cells per solve
  double seed_fraction = 1e-3;  // Riemannian seed time as a fraction of tau
  double seed_tolerance = 0.05; // allowed raw seed mass deficit before renormalisation
  double tolerance = 1e-6;
  bool equality = false;
  double dtau_rel = 1e-3;     // relative time step, small enough that the h^2 error dominates
  bool richardson = true;     // combine h and h/2 solves
};

// Kahler heat kernel at Kahler time t is the Riemannian kernel at tau = t/4.
HeatComparison subvariety_heat_comparison(const GraphCurve& curve, std::span<const double> ts,
                                          const HeatComparisonOptions& options = {});

struct AreaSeries {
  std::vector<double> rho;
  std::vector<double> area;
  std::vector<double> ratio;   // (pi rho^2)^{m-s} A / V0 = 2 A / (pi rho^2)
  std::vector<double> nu_hat;  // running sup of ratio
  bool complete = true;        // false if quadrature stopped early
  double last_change = 0.0;    // relative change of the last area under refinement
};

// Area of the graph inside the ambient ball |z|^2 + |P(z)|^2 <= rho^2.
double graph_area(const GraphCurve& curve, double rho, int resolution);
AreaSeries area_function(const GraphCurve& curve, std::span<const double> rhos, int resolution = 2000,
                         double convergence = 1e-7);

// Ambient ball volume in C^2.
inline double ambient_ball_volume(double rho) { return 0.5 * pi * pi * rho * rho * rho * rho; }

// Largest rho' allowed for rho: delta(s) rho with delta(s) = 1/sqrt(2 + 4s).
double admissible_inner_radius(double rho, int s = curve_dimension);

struct RatioPair {
  double inner = 0.0;
  double outer = 0.0;
  double lhs = 0.0;        // A(rho') rho'^{2(m-s)} / V0(rho')
  double rhs_basis = 0.0;  // A(rho) rho^{2(m-s)} / V0(rho)
  double quotient = 0.0;   // lhs / rhs_basis
};

RatioPair ratio_monotonicity(const GraphCurve& curve, double inner, double outer, int resolution = 2000);

struct LelongEstimate {
  AreaSeries series;
  double nu_hat = 0.0;         // sup over the grid
  double extrapolated = 0.0;   // Aitken limit of the last three doubling values (monomials)
  double growth_exponent = 0.0;  // d log(ratio) / d log(rho) over the last half of the grid
  bool diverges = false;
};

// Ratio series on the doubling grid rho_max / 2^k.
LelongEstimate lelong_number_estimate(const GraphCurve& curve, double rho_max, int levels = 6,
                                      int resolution = 2000);

struct VolumeGrowth {
  std::vector<double> rho;
  std::vector<double> volume;
  std::vector<double> over_rho2;
  std::vector<double> over_rho3;
  std::vector<double> over_rho;
  double limit = 0.0;  // pi * area of the compact factor
};

// C x CP^1 with the product metric (round factor of radius `sphere_radius`):
// volume of the ball about a point by product-measure quadrature.
VolumeGrowth volume_growth_consistency(std::span<const double> rhos, double sphere_radius = 1.0);

void write_area_csv(std::ostream& out, const AreaSeries& series);

}  // namespace hlab
