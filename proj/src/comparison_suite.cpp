#include "hlab/comparison_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hlab {

namespace {

std::string grid_tag(double h, double extra, const char* extra_name) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "h=%.6g %s=%.6g", h, extra_name, extra);
  return buf;
}

}  // namespace

InequalityReport cheeger_yau_check(const WarpedModel& model, const HeatField& field, double tolerance,
                                   const SampleWindow& window, bool equality) {
  if (field.provenance != Provenance::seeded_delta)
    throw std::invalid_argument("cheeger_yau_check: field is not a fundamental solution");
  if (field.dimension != model.dimension()) throw std::invalid_argument("cheeger_yau_check: dimension mismatch");
  const int n = field.dimension;
  InequalityReport rep;
  rep.check = equality ? "heat_kernel_lower_bound_equality" : "heat_kernel_lower_bound";
  rep.tag = "H(x,y,tau) >= (4 pi tau)^(-n/2) exp(-r^2/(4 tau)) under Ric >= 0";
  rep.resolution = grid_tag(field.h, static_cast<double>(field.steps), "steps");
  rep.tolerance = tolerance;
  rep.ricci_min = model.ricci_certificate().min();
  rep.hypothesis_met = model.ricci_certificate().nonnegative();
  const int stride = std::max(1, window.stride);
  for (std::size_t j = 0; j < field.taus.size(); ++j) {
    const double tau = field.taus[j];
    if (tau < window.tau_min || tau > window.tau_max) continue;
    for (std::size_t i = 0; i < field.r.size(); i += stride) {
      const double r = field.r[i];
      if (r < window.r_min || r > window.r_max) continue;
      const double diff = field.u[j][i] - flat_heat_kernel(n, r, tau);
      rep.add(r, tau, equality ? -std::abs(diff) : diff);
    }
  }
  rep.finalize();
  return rep;
}

InequalityReport subsolution_residual(const WarpedModel& model, std::span<const double> taus,
                                      std::span<const double> rs, double tolerance, double delta,
                                      bool equality) {
  const int n = model.dimension();
  InequalityReport rep;
  rep.check = equality ? "barrier_subsolution_equality" : "barrier_subsolution";
  rep.tag = "(d_tau - Delta)[(4 pi tau)^(-n/2) exp(-ell)] <= 0 under Ric >= 0";
  rep.resolution = grid_tag(delta, delta, "dtau_rel");
  rep.tolerance = tolerance;
  rep.ricci_min = model.ricci_certificate().min();
  rep.hypothesis_met = model.ricci_certificate().nonnegative();
  double cut = std::min(first_conjugate_arc(model), model.chart_limit());
  if (model.compact()) cut = std::min(cut, model.r_max());
  const auto barrier = [&](double r, double t) {
    return std::pow(4.0 * pi * t, -0.5 * n) * std::exp(-reduced_distance(model, r, t).ell);
  };
  for (double t : taus) {
    if (!(t > 0.0)) throw std::invalid_argument("subsolution_residual: tau must be positive");
    const double dt = delta * t;
    for (double r : rs) {
      if (!(r > delta) || r + delta >= cut)
        throw std::out_of_range("subsolution_residual: stencil crosses the cut radius");
      const double w0 = barrier(r, t);
      const double wp = barrier(r + delta, t);
      const double wm = barrier(r - delta, t);
      const double wt = (barrier(r, t + dt) - barrier(r, t - dt)) / (2.0 * dt);
      const double wr = (wp - wm) / (2.0 * delta);
      const double wrr = (wp - 2.0 * w0 + wm) / (delta * delta);
      const double lap = wrr + (n - 1) * model.dphi(r) / model.phi(r) * wr;
      const double residual = wt - lap;
      rep.add(r, t, equality ? -std::abs(residual) : -residual);
    }
  }
  rep.finalize();
  return rep;
}

CollapseTable kappa_collapse_experiment(std::span<const double> circumferences, double r, int flat_dim) {
  if (!(r > 0.0)) throw std::invalid_argument("kappa_collapse_experiment: r must be positive");
  if (circumferences.empty()) throw std::invalid_argument("kappa_collapse_experiment: empty family");
  CollapseTable table;
  table.r = r;
  for (double eps : circumferences) {
    const FlatCylinder cyl{eps, flat_dim};
    const int n = cyl.dimension();
    CollapseRow row;
    row.circumference = eps;
    row.kappa = cylinder_ball_volume(cyl, r) / std::pow(r, n);
    row.uncollapsed = row.kappa > 0.9 * unit_ball_volume(n);
    const double root = std::pow(row.kappa, 1.0 / n);
    row.tau = root * r * r;
    const double t[] = {row.tau};
    row.reduced_volume = reduced_volume(cyl, t).V_tangent[0];
    row.bound_basis = std::sqrt(row.kappa) + std::exp(-1.0 / (8.0 * root));
    row.ratio = row.reduced_volume / row.bound_basis;
    table.constant = std::max(table.constant, row.ratio);
    table.rows.push_back(row);
  }
  return table;
}

InequalityReport monotonicity_report(const std::string& name, std::span<const double> taus,
                                     std::span<const double> values, double tolerance, bool hypothesis_met) {
  if (taus.size() != values.size()) throw std::invalid_argument("monotonicity_report: size mismatch");
  if (values.size() < 3) throw std::invalid_argument("monotonicity_report: series shorter than 3 points");
  InequalityReport rep;
  rep.check = name;
  rep.tag = "series is non-increasing in tau";
  rep.resolution = "points=" + std::to_string(values.size());
  rep.tolerance = tolerance;
  rep.ricci_min = std::numeric_limits<double>::quiet_NaN();
  rep.hypothesis_met = hypothesis_met;
  for (std::size_t j = 1; j < values.size(); ++j)
    rep.add(static_cast<double>(j), taus[j], -(values[j] - values[j - 1]));
  rep.finalize();
  return rep;
}

InequalityReport monotonicity_report(const std::string& name, const ReducedVolumeSeries& series,
                                     double tolerance, bool hypothesis_met) {
  return monotonicity_report(name, series.taus, series.V_tangent, tolerance, hypothesis_met);
}

InequalityReport monotonicity_report(const std::string& name, const EntropyReport& report,
                                     EntropyQuantity which, double tolerance) {
  return monotonicity_report(name, report.taus, which == EntropyQuantity::W ? report.W : report.N, tolerance,
                             report.hypothesis_met && report.fundamental_input);
}

}  // namespace hlab
