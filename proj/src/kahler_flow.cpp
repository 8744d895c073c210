#include "hlab/kahler_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace hlab {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double chart_radius(double theta) {
  return theta >= pi ? std::numeric_limits<double>::infinity() : std::tan(0.5 * theta);
}

// Exact cell areas on the unit sphere: 2 pi (cos a - cos b).
std::vector<double> unit_sphere_cells(int intervals) {
  const double h = pi / intervals;
  std::vector<double> v(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double a = std::max(0.0, (i - 0.5) * h);
    const double b = std::min(pi, (i + 0.5) * h);
    v[i] = 2.0 * pi * (std::cos(a) - std::cos(b));
  }
  return v;
}

// Laplacian on the unit sphere of a radial function sampled on [0, pi]:
// f'' + cot(theta) f', with 2 f'' at both poles.
double sphere_laplacian(std::span<const double> f, std::size_t i, double h) {
  const std::size_t N = f.size() - 1;
  if (i == 0) return 4.0 * (f[1] - f[0]) / (h * h);
  if (i == N) return 4.0 * (f[N - 1] - f[N]) / (h * h);
  const double theta = static_cast<double>(i) * h;
  const double fpp = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
  const double fp = (f[i + 1] - f[i - 1]) / (2.0 * h);
  return fpp + fp / std::tan(theta);
}

double sphere_gradient(std::span<const double> f, std::size_t i, double h) {
  const std::size_t N = f.size() - 1;
  if (i == 0 || i == N) return 0.0;
  return (f[i + 1] - f[i - 1]) / (2.0 * h);
}

bool stencil_above(std::span<const double> u, std::size_t i, double floor) {
  const std::size_t lo = i == 0 ? 0 : i - 1;
  const std::size_t hi = std::min(u.size() - 1, i + 1);
  for (std::size_t k = lo; k <= hi; ++k)
    if (!(u[k] >= floor)) return false;
  return true;
}

}  // namespace

double RoundSpherePath::metric(double r, double t) const {
  const double q = 1.0 + r * r;
  return 4.0 * rho2(t) / (q * q);
}

double RoundSpherePath::ricci(double r) const {
  const double q = 1.0 + r * r;
  return 2.0 / (q * q);
}

double RoundSpherePath::area_by_quadrature(double t) const {
  // Chart plane in the angle variable r = tan(theta / 2): g 2 pi r dr/dtheta.
  return integrate(
      [&](double th) {
        const double c = std::cos(0.5 * th);
        return metric(std::tan(0.5 * th), t) * pi * std::tan(0.5 * th) / (c * c);
      },
      0.0, pi * (1.0 - 1e-12), 4000);
}

double RoundSpherePath::total_scalar_by_quadrature(double t) const {
  return integrate(
      [&](double th) {
        const double c = std::cos(0.5 * th);
        const double r = std::tan(0.5 * th);
        return scalar(t) * metric(r, t) * pi * r / (c * c);
      },
      0.0, pi * (1.0 - 1e-12), 4000);
}

RoundSpherePath evolve_round_flow(double rho0, std::span<const double> ts) {
  if (!(rho0 > 0.0)) throw std::invalid_argument("evolve_round_flow: rho0 must be positive");
  RoundSpherePath p;
  p.rho0 = rho0;
  const double T = p.extinction();
  for (double t : ts) {
    if (!(t >= 0.0) || t >= T * (1.0 - 1e-12))
      throw std::invalid_argument("evolve_round_flow: time outside [0, T) with T = 2 rho0^2");
    p.ts.push_back(t);
  }
  // g is affine in t, so the difference is exact up to rounding; a wide step
  // keeps the rounding small.
  for (double t : p.ts) {
    const double dt = 0.5 * (T - t);
    for (double r : {0.0, 0.3, 1.0, 2.5, 10.0}) {
      const double dg = (p.metric(r, t + dt) - p.metric(r, std::max(0.0, t - dt))) / (t + dt - std::max(0.0, t - dt));
      p.flow_residual = std::max(p.flow_residual, std::abs(dg + p.ricci(r)) / p.ricci(r));
    }
  }
  return p;
}

double ConjugateHeatField::max_mass_drift() const {
  double d = 0.0;
  for (double m : mass) d = std::max(d, std::abs(m - initial_mass) / initial_mass);
  return d;
}

std::vector<double> near_delta_data(double rho0, int intervals, double width) {
  if (intervals < 4 || !(width > 0.0) || !(rho0 > 0.0))
    throw std::invalid_argument("near_delta_data: invalid parameters");
  const double h = pi / intervals;
  const std::vector<double> cells = unit_sphere_cells(intervals);
  std::vector<double> u(intervals + 1);
  double mass = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double d = rho0 * i * h;
    u[i] = std::exp(-d * d / (4.0 * width)) / (4.0 * pi * width);
    mass += cells[i] * rho0 * rho0 * u[i];
  }
  for (double& v : u) v /= mass;
  return u;
}

ConjugateHeatField solve_forward_conjugate(const RoundSpherePath& path, std::span<const double> initial,
                                           int intervals, std::span<const double> ts,
                                           const ConjugateSolveOptions& options) {
  if (static_cast<int>(initial.size()) != intervals + 1)
    throw std::invalid_argument("solve_forward_conjugate: initial data size does not match the grid");
  for (double v : initial)
    if (!(v > 0.0)) throw std::invalid_argument("solve_forward_conjugate: initial data must be positive");
  const double T = path.extinction();
  std::vector<double> s_out;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    if (!(ts[j] >= 0.0) || ts[j] >= T * (1.0 - 1e-12))
      throw std::invalid_argument("solve_forward_conjugate: time outside [0, T)");
    if (j > 0 && !(ts[j] > ts[j - 1])) throw std::invalid_argument("solve_forward_conjugate: times must increase");
    s_out.push_back(-0.5 * std::log(path.rho2(ts[j]) / (path.rho0 * path.rho0)));
  }
  if (s_out.empty()) throw std::invalid_argument("solve_forward_conjugate: no output times");
  const double m = options.convention == ScalarConvention::complex_trace ? 1.0 : 4.0;

  const WarpedModel unit = WarpedModel::sphere(2, 1.0);
  RadialGrid grid;
  grid.intervals = intervals;
  grid.r_max = pi;
  grid.tau0 = 0.0;
  grid.tau_end = s_out.back();
  grid.dtau_rel = 0.01;
  grid.dtau_min = 2e-5;
  grid.dtau_max = 2e-3;
  const HeatField w = solve_radial_heat(unit, grid, initial, s_out);

  ConjugateHeatField out;
  out.rho0 = path.rho0;
  out.h = w.h;
  out.theta = w.r;
  for (double th : out.theta) out.r.push_back(chart_radius(th));
  double m0 = 0.0;
  for (std::size_t i = 0; i < initial.size(); ++i) m0 += w.cell_volume[i] * path.rho0 * path.rho0 * initial[i];
  out.initial_mass = m0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double rho2 = path.rho2(ts[j]);
    const double a = std::pow(path.rho0 * path.rho0 / rho2, m);
    std::vector<double> u(w.u[j].size());
    double mass = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = a * w.u[j][i];
      mass += w.cell_volume[i] * rho2 * u[i];
    }
    out.ts.push_back(ts[j]);
    out.u.push_back(std::move(u));
    out.mass.push_back(mass);
  }
  if (options.enforce_mass && out.max_mass_drift() > options.mass_tolerance)
    throw NumericalFailure("solve_forward_conjugate: mass drift " + std::to_string(out.max_mass_drift()) +
                           " (scalar-curvature convention or scheme error)");
  return out;
}

LYHField lyh_quantity(const ConjugateHeatField& field, const RoundSpherePath& path, double floor) {
  LYHField out;
  out.h = field.h;
  const std::size_t N = field.theta.size() - 1;
  // The antipode sits at chart infinity; it is left out of the chart field.
  for (std::size_t i = 0; i < N; ++i) {
    out.theta.push_back(field.theta[i]);
    out.r.push_back(field.r[i]);
  }
  out.min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> f(N + 1);
  for (std::size_t j = 0; j < field.ts.size(); ++j) {
    const double t = field.ts[j];
    if (!(t > 0.0)) throw std::invalid_argument("lyh_quantity: t = 0 is excluded (g/t term)");
    const double rho2 = path.rho2(t);
    const auto& u = field.u[j];
    for (std::size_t i = 0; i <= N; ++i) f[i] = std::log(std::max(u[i], floor));
    std::vector<double> M(N), Mg(N);
    for (std::size_t i = 0; i < N; ++i) {
      if (!stencil_above(u, i, floor)) {
        M[i] = Mg[i] = nan;
        continue;
      }
      Mg[i] = sphere_laplacian(f, i, field.h) / (4.0 * rho2) + 1.0 / t + path.scalar(t);
      M[i] = path.metric(field.r[i], t) * Mg[i];
      out.min_margin = std::min(out.min_margin, Mg[i]);
    }
    out.ts.push_back(t);
    out.M.push_back(std::move(M));
    out.M_over_g.push_back(std::move(Mg));
  }
  return out;
}

double lyh_raw(double u, std::complex<double> u_z, double u_zzbar, double g, double R, double t,
               std::complex<double> V) {
  return u_zzbar + u * g / t + u * R + 2.0 * std::real(u_z * std::conj(V)) + u * std::norm(V);
}

double lyh_v_optimality(const ConjugateHeatField& field, const RoundSpherePath& path, int samples,
                        std::uint64_t seed) {
  const LYHField lyh = lyh_quantity(field, path);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t N = field.theta.size() - 1;
  std::vector<double> f(N + 1);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < field.ts.size(); ++j) {
    const double t = field.ts[j];
    const double rho2 = path.rho2(t);
    for (std::size_t i = 0; i <= N; ++i) f[i] = std::log(std::max(field.u[j][i], 1e-300));
    for (std::size_t i = 0; i < N; ++i) {
      const double M = lyh.M[j][i];
      if (std::isnan(M)) continue;
      const double u = field.u[j][i];
      const double r = field.r[i];
      const double g = path.metric(r, t);
      const double R = path.ricci(r);
      // At the real point z = r: d/dz = (1/2) d/dr and dr/dtheta = 1 / (2 cos^2(theta/2)).
      const double c = std::cos(0.5 * field.theta[i]);
      const double logz = sphere_gradient(f, i, field.h) * c * c;
      const double log_zzbar = g * sphere_laplacian(f, i, field.h) / (4.0 * rho2);
      const std::complex<double> u_z = u * logz;
      const double u_zzbar = u * (log_zzbar + logz * logz);
      const double scale = std::abs(u * M) + u * g / t + u * R;
      for (int k = 0; k < samples; ++k) {
        const double spread = 1.0 + std::abs(logz);
        const std::complex<double> V(spread * normal(rng), spread * normal(rng));
        const double q = lyh_raw(u, u_z, u_zzbar, g, R, t, V);
        worst = std::max(worst, (u * M - q) / scale);
      }
    }
  }
  return worst;
}

InequalityReport lyh_check_static(const WarpedModel& surface, const HeatField& field, double tolerance,
                                  bool equality, double floor) {
  if (surface.dimension() != 2 || field.dimension != 2)
    throw std::invalid_argument("lyh_check_static: needs a surface (n = 2)");
  InequalityReport rep;
  rep.check = equality ? "static_lyh_equality" : "static_lyh";
  rep.tag = "(log u)_{1 1bar} + g_{1 1bar}/t >= 0 for positive caloric u on a static surface";
  char buf[64];
  std::snprintf(buf, sizeof buf, "h=%.6g steps=%ld", field.h, field.steps);
  rep.resolution = buf;
  rep.tolerance = tolerance;
  rep.ricci_min = surface.ricci_certificate().min();
  rep.hypothesis_met = surface.ricci_certificate().nonnegative();
  const std::size_t N = field.r.size() - 1;
  const double h = field.h;
  std::vector<double> f(N + 1);
  for (std::size_t j = 0; j < field.taus.size(); ++j) {
    const double t = 4.0 * field.taus[j];
    const auto& u = field.u[j];
    for (std::size_t i = 0; i <= N; ++i) f[i] = std::log(std::max(u[i], floor));
    for (std::size_t i = 0; i < N; ++i) {
      if (!stencil_above(u, i, floor)) continue;
      double lap = 0.0;
      if (i == 0) {
        lap = 4.0 * (f[1] - f[0]) / (h * h);
      } else {
        const double r = field.r[i];
        lap = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h) +
              surface.dphi(r) / surface.phi(r) * (f[i + 1] - f[i - 1]) / (2.0 * h);
      }
      const double margin = 0.25 * lap + 1.0 / t;
      rep.add(field.r[i], t, equality ? -std::abs(margin) : margin);
    }
  }
  rep.finalize();
  return rep;
}

InequalityReport lyh_check_flat_chart(const std::function<double(double x, double y, double t)>& u,
                                      std::span<const ChartPoint> points, std::span<const double> ts,
                                      double h, double tolerance, bool equality) {
  InequalityReport rep;
  rep.check = equality ? "flat_chart_lyh_equality" : "flat_chart_lyh";
  rep.tag = "(log u)_{z zbar} + 1/t >= 0 for positive caloric u on C";
  char buf[64];
  std::snprintf(buf, sizeof buf, "h=%.6g", h);
  rep.resolution = buf;
  rep.tolerance = tolerance;
  rep.ricci_min = 0.0;
  rep.hypothesis_met = true;
  for (double t : ts) {
    if (!(t > 0.0)) throw std::invalid_argument("lyh_check_flat_chart: t must be positive");
    for (const ChartPoint& p : points) {
      const auto f = [&](double x, double y) { return std::log(u(x, y, t)); };
      const double lap =
          (f(p.x + h, p.y) + f(p.x - h, p.y) + f(p.x, p.y + h) + f(p.x, p.y - h) - 4.0 * f(p.x, p.y)) / (h * h);
      const double margin = 0.25 * lap + 1.0 / t;
      rep.add(std::hypot(p.x, p.y), t, equality ? -std::abs(margin) : margin);
    }
  }
  rep.finalize();
  return rep;
}

double kahler_flat_kernel(double x, double y, double t) {
  return std::exp(-(x * x + y * y) / t) / (pi * t);
}

void write_lyh_csv(std::ostream& out, const LYHField& field) {
  out << "t,r,M\n";
  char buf[96];
  for (std::size_t j = 0; j < field.ts.size(); ++j)
    for (std::size_t i = 0; i < field.r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", field.ts[j], field.r[i], field.M[j][i]);
      out << buf;
    }
}

}  // namespace hlab
