#include "hlab/subvariety_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hlab/heat_solver.hpp"
#include "hlab/kahler_flow.hpp"

namespace hlab {

namespace {

using cplx = std::complex<double>;

// Three-point Gauss-Legendre on [a, b].
template <class F>
double gauss3(F&& f, double a, double b) {
  const double m = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double x = r * std::sqrt(0.6);
  return r * (5.0 * f(m - x) + 8.0 * f(m) + 5.0 * f(m + x)) / 9.0;
}

double monomial_extent(int d, double rho) {
  // X^2 + X^{2d} = rho^2 has a single root on [0, rho].
  return bisect([&](double x) { return x * x + std::pow(x, 2 * d) - rho * rho; }, 0.0, rho, 1e-15 * (1.0 + rho));
}

double exponential_area(double rho, int resolution) {
  const int angles = resolution;
  const int steps = resolution;
  const double ds = rho / steps;
  double total = 0.0;
  for (int a = 0; a < angles; ++a) {
    const double theta = 2.0 * pi * a / angles;
    const cplx dir = std::polar(1.0, theta);
    const auto excess = [&](double s) {
      const cplx z = s * dir;
      return s * s + std::norm(std::exp(z) - 1.0) - rho * rho;
    };
    const auto weight = [&](double s) { return (1.0 + std::exp(2.0 * s * dir.real())) * s; };
    double ray = 0.0;
    double prev = excess(0.0);
    for (int k = 0; k < steps; ++k) {
      const double s0 = k * ds;
      const double s1 = s0 + ds;
      const double next = excess(s1);
      const bool in0 = prev <= 0.0;
      const bool in1 = next <= 0.0;
      if (in0 && in1) {
        ray += gauss3(weight, s0, s1);
      } else if (in0 != in1) {
        const double c = bisect(excess, s0, s1, 1e-14 * rho);
        ray += in0 ? gauss3(weight, s0, c) : gauss3(weight, c, s1);
      }
      prev = next;
    }
    total += ray;
  }
  return total * 2.0 * pi / angles;
}

}  // namespace

GraphCurve GraphCurve::monomial(int d) {
  if (d < 1) throw std::invalid_argument("GraphCurve: degree must be >= 1");
  return {Kind::monomial, d};
}

GraphCurve GraphCurve::exponential() { return {Kind::exponential, 0}; }

cplx GraphCurve::P(cplx z) const {
  return kind == Kind::monomial ? std::pow(z, degree) : std::exp(z) - 1.0;
}

cplx GraphCurve::dP(cplx z) const {
  if (kind == Kind::exponential) return std::exp(z);
  return static_cast<double>(degree) * (degree == 1 ? cplx(1.0) : std::pow(z, degree - 1));
}

std::function<double(cplx)> induced_graph_metric(const GraphCurve& curve) {
  return [curve](cplx z) { return 1.0 + std::norm(curve.dP(z)); };
}

WarpedModel graph_surface(const GraphCurve& curve, double rho_max, int rows) {
  if (!curve.radial()) throw std::invalid_argument("graph_surface: only monomial graphs are rotationally symmetric");
  if (!(rho_max > 0.0) || rows < 8) throw std::invalid_argument("graph_surface: invalid table request");
  const int d = curve.degree;
  const auto lambda = [d](double x) { return 1.0 + d * d * std::pow(x, 2 * (d - 1)); };
  const auto speed = [&](double x) { return std::sqrt(lambda(x)); };
  ProfileTable table;
  table.r.push_back(0.0);
  table.phi.push_back(0.0);
  const double target = rho_max / rows;
  double x = 0.0;
  double rho = 0.0;
  while (rho < rho_max) {
    const double dx = target / speed(x);
    rho += gauss3(speed, x, x + 0.5 * dx) + gauss3(speed, x + 0.5 * dx, x + dx);
    x += dx;
    table.r.push_back(rho);
    table.phi.push_back(x * speed(x));
  }
  return WarpedModel::custom(2, table);
}

HeatComparison subvariety_heat_comparison(const GraphCurve& curve, std::span<const double> ts,
                                          const HeatComparisonOptions& options) {
  HeatComparison out;
  InequalityReport& rep = out.report;
  rep.check = options.equality ? "subvariety_kernel_equality" : "subvariety_kernel_comparison";
  rep.tag = "K_V(0,0,t) <= (pi t)^(m-s) H(0,0,t)";
  char buf[96];
  std::snprintf(buf, sizeof buf, "intervals=%d seed_fraction=%.3g richardson=%d", options.intervals,
                options.seed_fraction, options.richardson ? 1 : 0);
  rep.resolution = buf;
  rep.tolerance = options.tolerance;
  rep.ricci_min = 0.0;  // ambient C^2 is flat
  rep.hypothesis_met = true;
  for (double t : ts) {
    if (!(t > 0.0)) throw std::invalid_argument("subvariety_heat_comparison: t must be positive");
    const double tau = kahler_to_riemannian_time(t);
    const double R = boundary_radius(2, tau, 1e-12);
    const WarpedModel surface = graph_surface(curve, R * 1.02);
    const auto pole_value = [&](int intervals) {
      RadialGrid grid;
      grid.intervals = intervals;
      grid.r_max = R;
      grid.tau0 = options.seed_fraction * tau;
      grid.tau_end = tau;
      grid.dtau_rel = options.dtau_rel;
      grid.dtau_min = 1e-3 * grid.tau0;
      grid.dtau_max = tau;
      const double out_tau[] = {tau};
      const HeatField f = fundamental_solution(surface, grid, out_tau, options.seed_tolerance);
      return f.u[0][0];
    };
    double K = pole_value(options.intervals);
    if (options.richardson) K = (4.0 * pole_value(2 * options.intervals) - K) / 3.0;
    const double bound = 1.0 / (pi * t);
    out.ts.push_back(t);
    out.K.push_back(K);
    out.scaled.push_back(pi * t * K);
    rep.add(0.0, t, options.equality ? -std::abs(bound - K) : bound - K);
  }
  rep.finalize();
  return out;
}

double graph_area(const GraphCurve& curve, double rho, int resolution) {
  if (!(rho > 0.0)) throw std::invalid_argument("graph_area: rho must be positive");
  if (resolution < 8) throw std::invalid_argument("graph_area: resolution too small");
  if (curve.radial()) {
    const int d = curve.degree;
    const double X = monomial_extent(d, rho);
    return integrate([&](double x) { return (1.0 + d * d * std::pow(x, 2 * (d - 1))) * 2.0 * pi * x; }, 0.0, X,
                     resolution);
  }
  return exponential_area(rho, resolution);
}

AreaSeries area_function(const GraphCurve& curve, std::span<const double> rhos, int resolution,
                         double convergence) {
  AreaSeries s;
  double sup = 0.0;
  for (std::size_t j = 0; j < rhos.size(); ++j) {
    const double rho = rhos[j];
    if (j > 0 && !(rho > rhos[j - 1])) throw std::invalid_argument("area_function: rho grid must increase");
    const double coarse = graph_area(curve, rho, resolution);
    const double fine = graph_area(curve, rho, 2 * resolution);
    s.last_change = std::abs(fine - coarse) / fine;
    if (s.last_change > convergence) {
      s.complete = false;
      break;
    }
    const double ratio = pi * rho * rho * fine / ambient_ball_volume(rho);
    sup = std::max(sup, ratio);
    s.rho.push_back(rho);
    s.area.push_back(fine);
    s.ratio.push_back(ratio);
    s.nu_hat.push_back(sup);
  }
  return s;
}

double admissible_inner_radius(double rho, int s) { return rho / std::sqrt(2.0 + 4.0 * s); }

RatioPair ratio_monotonicity(const GraphCurve& curve, double inner, double outer, int resolution) {
  if (!(inner > 0.0) || !(outer > 0.0)) throw std::invalid_argument("ratio_monotonicity: radii must be positive");
  if (inner > admissible_inner_radius(outer) * (1.0 + 1e-14))
    throw std::invalid_argument("ratio_monotonicity: inner radius exceeds delta(s) * rho");
  constexpr int k = 2 * (ambient_dimension - curve_dimension);
  RatioPair p;
  p.inner = inner;
  p.outer = outer;
  p.lhs = graph_area(curve, inner, resolution) * std::pow(inner, k) / ambient_ball_volume(inner);
  p.rhs_basis = graph_area(curve, outer, resolution) * std::pow(outer, k) / ambient_ball_volume(outer);
  p.quotient = p.lhs / p.rhs_basis;
  return p;
}

LelongEstimate lelong_number_estimate(const GraphCurve& curve, double rho_max, int levels, int resolution) {
  if (levels < 3) throw std::invalid_argument("lelong_number_estimate: need at least three levels");
  std::vector<double> rhos;
  for (int k = levels - 1; k >= 0; --k) rhos.push_back(rho_max / std::pow(2.0, k));
  LelongEstimate e;
  e.series = area_function(curve, rhos, resolution);
  const auto& q = e.series.ratio;
  if (q.empty()) throw NumericalFailure("lelong_number_estimate: no converged area values");
  e.nu_hat = e.series.nu_hat.back();
  e.extrapolated = q.back();
  if (q.size() >= 3) {
    const double d1 = q[q.size() - 2] - q[q.size() - 3];
    const double d2 = q.back() - q[q.size() - 2];
    if (std::abs(d1 - d2) > 1e-14 * std::abs(q.back()) && curve.radial())
      e.extrapolated = q.back() - d2 * d2 / (d2 - d1);
  }
  if (q.size() >= 2) {
    const std::size_t mid = q.size() / 2;
    const std::size_t last = q.size() - 1;
    if (last > mid || mid > 0) {
      const std::size_t lo = last > mid ? mid : 0;
      e.growth_exponent = std::log(q[last] / q[lo]) / std::log(e.series.rho[last] / e.series.rho[lo]);
    }
  }
  e.diverges = e.growth_exponent > 0.1 || !e.series.complete;
  return e;
}

VolumeGrowth volume_growth_consistency(std::span<const double> rhos, double sphere_radius) {
  if (!(sphere_radius > 0.0)) throw std::invalid_argument("volume_growth_consistency: radius must be positive");
  const double Rs = sphere_radius;
  VolumeGrowth g;
  g.limit = pi * 4.0 * pi * Rs * Rs;
  for (double rho : rhos) {
    if (!(rho > 0.0)) throw std::invalid_argument("volume_growth_consistency: rho must be positive");
    // Points of the compact factor at distance d carry a flat disc of radius sqrt(rho^2 - d^2).
    const double reach = std::min(rho, pi * Rs);
    const double V = integrate(
        [&](double d) { return pi * (rho * rho - d * d) * 2.0 * pi * Rs * std::sin(d / Rs); }, 0.0, reach, 4000);
    g.rho.push_back(rho);
    g.volume.push_back(V);
    g.over_rho2.push_back(V / (rho * rho));
    g.over_rho3.push_back(V / (rho * rho * rho));
    g.over_rho.push_back(V / rho);
  }
  return g;
}

void write_area_csv(std::ostream& out, const AreaSeries& series) {
  out << "rho,area,ratio,nu_hat\n";
  char buf[128];
  for (std::size_t j = 0; j < series.rho.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", series.rho[j], series.area[j], series.ratio[j],
                  series.nu_hat[j]);
    out << buf;
  }
}

}  // namespace hlab
