#include "hlab/heat_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace hlab {

double RadialGrid::step_at(double tau) const {
  return std::clamp(dtau_rel * tau, dtau_min, dtau_max);
}

void RadialGrid::validate() const {
  if (intervals < 4) throw std::invalid_argument("RadialGrid: need at least four intervals");
  if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be positive");
  if (!(tau0 >= 0.0) || !(tau_end >= tau0))
    throw std::invalid_argument("RadialGrid: need 0 <= tau0 <= tau_end");
  if (!(dtau_min > 0.0) || !(dtau_max >= dtau_min) || dtau_rel < 0.0)
    throw std::invalid_argument("RadialGrid: invalid time step rule");
}

double boundary_radius(int n, double tau_end, double tail) {
  const double scale = std::sqrt(4.0 * tau_end);
  const auto tail_mass = [&](double R) {
    const double density = unit_sphere_area(n - 1) * std::pow(4.0 * pi * tau_end, -0.5 * n);
    return integrate([&](double s) { return density * std::pow(s, n - 1) * std::exp(-s * s / (4.0 * tau_end)); },
                     R, R + 12.0 * scale, 2000);
  };
  double lo = 0.0;
  double hi = 10.0 * scale;
  while (tail_mass(hi) > tail) hi *= 1.5;
  for (int it = 0; it < 100 && hi - lo > 1e-6 * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail_mass(mid) > tail ? lo : hi) = mid;
  }
  return hi;
}

double HeatField::max_mass_drift() const {
  double drift = 0.0;
  for (double m : mass) drift = std::max(drift, std::abs(m - mass.front()));
  return drift;
}

namespace {

struct Discretization {
  std::vector<double> volume;
  std::vector<double> face;  // face[i] couples nodes i and i+1
};

Discretization discretize(const WarpedModel& model, const RadialGrid& grid) {
  const int N = grid.intervals;
  const int n = model.dimension();
  const double h = grid.h();
  const double omega = unit_sphere_area(n - 1);
  const auto density = [&](double r) { return omega * std::pow(std::max(model.phi(r), 0.0), n - 1); };
  Discretization d;
  d.volume.resize(N + 1);
  d.face.resize(N);
  for (int i = 0; i <= N; ++i) {
    const double a = std::max(0.0, grid.r(i) - 0.5 * h);
    const double b = std::min(grid.r_max, grid.r(i) + 0.5 * h);
    d.volume[i] = integrate(density, a, b, 16);
  }
  for (int i = 0; i < N; ++i) d.face[i] = density(grid.r(i) + 0.5 * h) / h;
  return d;
}

}  // namespace

HeatField solve_radial_heat(const WarpedModel& model, const RadialGrid& grid,
                            std::span<const double> initial, std::span<const double> output_taus,
                            const HeatSolveOptions& options) {
  grid.validate();
  const int N = grid.intervals;
  if (static_cast<int>(initial.size()) != N + 1)
    throw std::invalid_argument("solve_radial_heat: initial data size does not match the grid");
  const double extent = model.compact() ? model.r_max() : model.chart_limit();
  if (grid.r_max > extent * (1.0 + 1e-12))
    throw std::invalid_argument("solve_radial_heat: grid extends past the model");
  for (double v : initial)
    if (!(v >= 0.0)) throw std::invalid_argument("solve_radial_heat: negative initial data");
  for (std::size_t j = 0; j < output_taus.size(); ++j) {
    if (output_taus[j] < grid.tau0 || output_taus[j] > grid.tau_end * (1.0 + 1e-12))
      throw std::invalid_argument("solve_radial_heat: output time outside the horizon");
    if (j > 0 && !(output_taus[j] > output_taus[j - 1]))
      throw std::invalid_argument("solve_radial_heat: output times must increase");
  }

  const Discretization disc = discretize(model, grid);
  HeatField field;
  field.dimension = model.dimension();
  field.h = grid.h();
  field.cell_volume = disc.volume;
  field.r.resize(N + 1);
  for (int i = 0; i <= N; ++i) field.r[i] = grid.r(i);

  std::vector<double> u(initial.begin(), initial.end());
  const auto mass_of = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (int i = 0; i <= N; ++i) m += disc.volume[i] * v[i];
    return m;
  };
  const double mass0 = mass_of(u);

  std::vector<double> lower(N + 1), diag(N + 1), upper(N + 1), rhs(N + 1);
  const auto cn_step = [&](double dt) {
    const double half = 0.5 * dt;
    for (int i = 0; i <= N; ++i) {
      const double aw = i > 0 ? disc.face[i - 1] : 0.0;
      const double ae = i < N ? disc.face[i] : 0.0;
      const double flux = (i < N ? ae * (u[i + 1] - u[i]) : 0.0) - (i > 0 ? aw * (u[i] - u[i - 1]) : 0.0);
      lower[i] = -half * aw;
      upper[i] = -half * ae;
      diag[i] = disc.volume[i] + half * (aw + ae);
      rhs[i] = disc.volume[i] * u[i] + half * flux;
    }
    solve_tridiagonal(lower, diag, upper, rhs);
    double peak = 0.0;
    double lowest = 0.0;
    for (int i = 0; i <= N; ++i) {
      peak = std::max(peak, std::abs(rhs[i]));
      lowest = std::min(lowest, rhs[i]);
    }
    if (lowest < -options.negativity_abort * peak)
      throw NumericalFailure("solve_radial_heat: positivity lost (min u = " + std::to_string(lowest) + ")");
    for (int i = 0; i <= N; ++i) u[i] = std::max(rhs[i], 0.0);
    ++field.steps;
  };

  const auto record = [&](double tau) {
    const double m = mass_of(u);
    if (std::abs(m - mass0) > options.mass_tolerance * std::max(mass0, 1e-300))
      throw NumericalFailure("solve_radial_heat: mass drift beyond tolerance");
    field.taus.push_back(tau);
    field.u.push_back(u);
    field.mass.push_back(m);
  };

  double tau = grid.tau0;
  for (double target : output_taus) {
    while (tau < target - 1e-14 * std::max(1.0, target)) {
      double dt = grid.step_at(tau);
      const double remaining = target - tau;
      if (remaining <= dt) {
        dt = remaining;
      } else if (remaining < 2.0 * dt) {
        dt = 0.5 * remaining;
      }
      cn_step(dt);
      tau += dt;
    }
    tau = target;
    record(target);
  }
  return field;
}

HeatField fundamental_solution(const WarpedModel& model, const RadialGrid& grid,
                               std::span<const double> output_taus, double seed_tolerance,
                               const HeatSolveOptions& options) {
  grid.validate();
  if (!(grid.tau0 > 0.0)) throw std::invalid_argument("fundamental_solution: tau0 must be positive");
  const int N = grid.intervals;
  const int n = model.dimension();
  std::vector<double> seed(N + 1);
  for (int i = 0; i <= N; ++i) seed[i] = flat_heat_kernel(n, grid.r(i), grid.tau0);

  const Discretization disc = discretize(model, grid);
  double raw_mass = 0.0;
  for (int i = 0; i <= N; ++i) raw_mass += disc.volume[i] * seed[i];
  const double deficit = 1.0 - raw_mass;
  if (std::abs(deficit) > seed_tolerance)
    throw std::invalid_argument("fundamental_solution: tau0 too large for the curvature scale "
                                "(seed mass deficit " + std::to_string(deficit) + ")");
  for (double& v : seed) v /= raw_mass;

  HeatField field = solve_radial_heat(model, grid, seed, output_taus, options);
  field.provenance = Provenance::seeded_delta;
  field.seed_mass_deficit = deficit;
  return field;
}

HeatField richardson_combine(const HeatField& coarse, const HeatField& fine) {
  const std::size_t N = coarse.r.size() - 1;
  if (fine.r.size() != 2 * N + 1 || fine.taus != coarse.taus || fine.dimension != coarse.dimension)
    throw std::invalid_argument("richardson_combine: fields are not nested");
  HeatField out = coarse;
  for (std::size_t j = 0; j < out.taus.size(); ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
      out.u[j][i] = (4.0 * fine.u[j][2 * i] - coarse.u[j][i]) / 3.0;
      m += out.cell_volume[i] * out.u[j][i];
    }
    out.mass[j] = m;
  }
  out.steps = coarse.steps + fine.steps;
  return out;
}

HeatField tabulate_kernel(const WarpedModel& model, const RadialGrid& grid, std::span<const double> taus,
                          const std::function<double(double r, double tau)>& kernel) {
  grid.validate();
  const Discretization disc = discretize(model, grid);
  HeatField f;
  f.dimension = model.dimension();
  f.h = grid.h();
  f.provenance = Provenance::seeded_delta;
  f.cell_volume = disc.volume;
  for (int i = 0; i <= grid.intervals; ++i) f.r.push_back(grid.r(i));
  for (double tau : taus) {
    std::vector<double> u(f.r.size());
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = kernel(f.r[i], tau);
      m += f.cell_volume[i] * u[i];
    }
    f.taus.push_back(tau);
    f.u.push_back(std::move(u));
    f.mass.push_back(m);
  }
  return f;
}

double flat_heat_kernel(int n, double r, double tau) {
  return std::pow(4.0 * pi * tau, -0.5 * n) * std::exp(-r * r / (4.0 * tau));
}

double sphere3_heat_kernel(double r, double tau, int images) {
  const double pref = std::pow(4.0 * pi * tau, -1.5) * std::exp(tau);
  const double s = std::sin(r);
  double sum = 0.0;
  if (std::abs(s) < 1e-8) {
    // r at a pole: (r + 2 pi k)/sin r -> derivative form of each image term.
    for (int k = -images; k <= images; ++k) {
      const double x = r + 2.0 * pi * k;
      sum += (1.0 - x * x / (2.0 * tau)) * std::exp(-x * x / (4.0 * tau)) / std::cos(r);
    }
    return pref * sum;
  }
  for (int k = -images; k <= images; ++k) {
    const double x = r + 2.0 * pi * k;
    sum += x * std::exp(-x * x / (4.0 * tau));
  }
  return pref * sum / s;
}

double sphere3_heat_kernel_leading(double r, double tau) {
  const double ratio = r < 1e-8 ? 1.0 : r / std::sin(r);
  return std::pow(4.0 * pi * tau, -1.5) * std::exp(tau) * ratio * std::exp(-r * r / (4.0 * tau));
}

double hyperbolic3_heat_kernel(double r, double tau) {
  const double ratio = r < 1e-8 ? 1.0 : r / std::sinh(r);
  return std::pow(4.0 * pi * tau, -1.5) * std::exp(-tau) * ratio * std::exp(-r * r / (4.0 * tau));
}

double EntropyReport::max_forward_W() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double d : dW) m = std::max(m, d);
  return m;
}

double EntropyReport::max_forward_N() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double d : dN) m = std::max(m, d);
  return m;
}

double EntropyReport::max_quadrature_gap() const {
  double g = 0.0;
  for (std::size_t j = 0; j < taus.size(); ++j) {
    g = std::max(g, std::abs(W[j] - W_trapezoid[j]));
    g = std::max(g, std::abs(N[j] - N_trapezoid[j]));
  }
  return g;
}

EntropyReport entropy_report(const WarpedModel& model, const HeatField& field,
                             const EntropyOptions& options) {
  const int n = field.dimension;
  if (n != model.dimension()) throw std::invalid_argument("entropy_report: dimension mismatch");
  const std::size_t nodes = field.r.size();
  const double h = field.h;
  std::vector<double> weight(nodes);
  for (std::size_t i = 0; i < nodes; ++i) weight[i] = model.measure_density(field.r[i]);
  const bool closes = model.compact() && std::abs(field.r.back() - model.conjugate_radius()) < 1e-12;

  EntropyReport rep;
  rep.dimension = n;
  rep.hypothesis_met = model.ricci_certificate().nonnegative();
  rep.fundamental_input = field.provenance == Provenance::seeded_delta;

  std::vector<double> f(nodes), fr(nodes), mass_int(nodes), w_int(nodes), n_int(nodes);
  for (std::size_t j = 0; j < field.taus.size(); ++j) {
    const double tau = field.taus[j];
    const auto& u = field.u[j];
    for (std::size_t i = 0; i < nodes; ++i) mass_int[i] = u[i] * weight[i];
    const double mass = simpson(mass_int, h);
    const double residual = std::abs(mass - 1.0);
    if (residual > options.normalization_tolerance)
      throw std::invalid_argument("entropy: field is not normalised (|int u - 1| = " +
                                  std::to_string(residual) + "); rescale first");

    const double shift = 0.5 * n * std::log(4.0 * pi * tau);
    for (std::size_t i = 0; i < nodes; ++i) f[i] = -std::log(std::max(u[i], options.positivity_floor)) - shift;
    fr[0] = 0.0;
    for (std::size_t i = 1; i + 1 < nodes; ++i) fr[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    fr[nodes - 1] = closes ? 0.0 : (3.0 * f[nodes - 1] - 4.0 * f[nodes - 2] + f[nodes - 3]) / (2.0 * h);

    for (std::size_t i = 0; i < nodes; ++i) {
      if (u[i] < options.positivity_floor) {
        w_int[i] = 0.0;
        n_int[i] = 0.0;
        continue;
      }
      w_int[i] = (tau * fr[i] * fr[i] + f[i] - n) * u[i] * weight[i];
      n_int[i] = f[i] * u[i] * weight[i];
    }
    rep.taus.push_back(tau);
    rep.W.push_back(simpson(w_int, h));
    rep.N.push_back(simpson(n_int, h) - 0.5 * n);
    rep.W_trapezoid.push_back(trapezoid(w_int, h));
    rep.N_trapezoid.push_back(trapezoid(n_int, h) - 0.5 * n);
    rep.mass_residual.push_back(residual);
  }
  for (std::size_t j = 1; j < rep.taus.size(); ++j) {
    rep.dW.push_back(rep.W[j] - rep.W[j - 1]);
    rep.dN.push_back(rep.N[j] - rep.N[j - 1]);
  }
  return rep;
}

EntropyReport w_entropy(const WarpedModel& model, const HeatField& field, const EntropyOptions& options) {
  return entropy_report(model, field, options);
}

EntropyReport nash_entropy(const WarpedModel& model, const HeatField& field, const EntropyOptions& options) {
  return entropy_report(model, field, options);
}

AvrLink avr_link_check(const WarpedModel& model, const AvrOptions& options) {
  AvrLink link;
  link.tau = options.tau;
  if (model.compact()) {
    link.compact = true;
    link.w_limit = -std::numeric_limits<double>::infinity();
    link.log_volume_ratio = -std::numeric_limits<double>::infinity();
    return link;
  }
  if (!model.ricci_certificate().nonnegative())
    throw std::invalid_argument("avr_link_check: needs a Ricci >= 0 certificate");
  double r_max = boundary_radius(model.dimension(), options.tau);
  if (r_max > model.chart_limit())
    throw std::invalid_argument("avr_link_check: profile table too short for the requested tau");
  RadialGrid grid;
  grid.intervals = static_cast<int>(std::ceil(r_max / options.h));
  grid.r_max = grid.intervals * options.h;
  if (grid.r_max > model.chart_limit()) {
    grid.intervals -= 1;
    grid.r_max = grid.intervals * options.h;
  }
  grid.tau0 = options.tau0;
  grid.tau_end = options.tau;
  grid.dtau_rel = 0.01;
  grid.dtau_min = 1e-5;
  grid.dtau_max = 0.25;
  const double out[] = {options.tau};
  const HeatField field = fundamental_solution(model, grid, out);
  const EntropyReport rep = entropy_report(model, field);
  link.w_limit = rep.W.back();
  link.r = model.r_max();
  const double ratio = ball_volume(model, link.r) / (unit_ball_volume(model.dimension()) *
                                                     std::pow(link.r, model.dimension()));
  link.log_volume_ratio = std::log(ratio);
  return link;
}

void write_heat_field_csv(std::ostream& out, const HeatField& field) {
  out << "tau,r,u\n" << std::setprecision(17);
  for (std::size_t j = 0; j < field.taus.size(); ++j)
    for (std::size_t i = 0; i < field.r.size(); ++i)
      out << field.taus[j] << ',' << field.r[i] << ',' << field.u[j][i] << '\n';
}

void write_entropy_csv(std::ostream& out, const EntropyReport& report) {
  out << "tau,W,N,mass_residual\n" << std::setprecision(17);
  for (std::size_t j = 0; j < report.taus.size(); ++j)
    out << report.taus[j] << ',' << report.W[j] << ',' << report.N[j] << ','
        << report.mass_residual[j] << '\n';
}

}  // namespace hlab
