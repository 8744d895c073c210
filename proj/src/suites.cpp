#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hlab/comparison_suite.hpp"
#include "hlab/heat_solver.hpp"
#include "hlab/kahler_flow.hpp"
#include "hlab/l_geodesics.hpp"
#include "hlab/runner.hpp"
#include "hlab/subvariety_suite.hpp"

namespace hlab {

namespace {

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// A scalar assertion assembled row by row.
InequalityReport assertion(const std::string& check, const std::string& tag, const std::string& resolution,
                           double tolerance, double ricci_min = std::numeric_limits<double>::quiet_NaN(),
                           bool hypothesis_met = true) {
  InequalityReport r;
  r.check = check;
  r.tag = tag;
  r.resolution = resolution;
  r.tolerance = tolerance;
  r.ricci_min = ricci_min;
  r.hypothesis_met = hypothesis_met;
  return r;
}

InequalityReport renamed(InequalityReport r, const std::string& name) {
  r.check = name;
  return r;
}

Series series_of(const std::string& name, const std::string& xl, const std::string& yl, std::vector<double> x,
                 std::vector<double> y, double tol, const InequalityReport& owner) {
  Series s;
  s.name = name;
  s.x_label = xl;
  s.y_label = yl;
  s.x = std::move(x);
  s.y = std::move(y);
  s.tolerance = tol;
  s.check = owner.check;
  s.tag = owner.tag;
  return s;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

// Fundamental solution at h and h/2, combined by Richardson extrapolation.
HeatField extrapolated_kernel(const WarpedModel& model, RadialGrid grid, std::span<const double> taus) {
  const HeatField coarse = fundamental_solution(model, grid, taus);
  grid.intervals *= 2;
  const HeatField fine = fundamental_solution(model, grid, taus);
  return richardson_combine(coarse, fine);
}

// Finite-difference Jacobian of v -> L exp_v(tau_bar), in normal coordinates,
// converted to Riemannian volume with the density (phi(r)/r)^{n-1}.
double jacobian_by_differences(const WarpedModel& model, const Vec& v, double tau_bar, double step) {
  const int n = model.dimension();
  std::vector<Vec> cols;
  for (int k = 0; k < n; ++k) {
    Vec vp = v, vm = v;
    vp[k] += step;
    vm[k] -= step;
    const Vec xp = l_exp(model, vp, tau_bar, 64).endpoint();
    const Vec xm = l_exp(model, vm, tau_bar, 64).endpoint();
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = (xp[i] - xm[i]) / (2.0 * step);
    cols.push_back(c);
  }
  // Determinant by Gaussian elimination with partial pivoting.
  std::vector<Vec> a(n, Vec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = cols[j][i];
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
    if (a[p][c] == 0.0) return 0.0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int i = c + 1; i < n; ++i) {
      const double f = a[i][c] / a[c][c];
      for (int j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  const Vec x = l_exp(model, v, tau_bar, 64).endpoint();
  double r = 0.0;
  for (double xi : x) r += xi * xi;
  r = std::sqrt(r);
  return std::abs(det) * std::pow(model.phi(r) / r, n - 1);
}

// ---- flat_sanity ----------------------------------------------------------

SuiteResult run_flat(const ExperimentConfig& c) {
  SuiteResult res;
  const int n = static_cast<int>(c.param("model.dimension"));
  const auto flat = WarpedModel::euclidean(n, 60.0);

  {
    auto rep = assertion("reduced_distance_equality", "ell(y, tau) = r^2 / (4 tau) on flat space", "shooting",
                         c.tolerance("reduced_distance_equality"), 0.0);
    for (double tau : {0.25, 1.0, 4.0})
      for (double r : {0.5, 1.0, 2.0, 4.0}) {
        const ReducedDistance d = reduced_distance(flat, r, tau);
        rep.add(r, tau, -std::abs(d.ell - r * r / (4.0 * tau)));
      }
    rep.finalize();
    res.checks.push_back(rep);
  }

  const double vt[] = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
  {
    const auto rv = reduced_volume(flat, vt);
    auto rep = assertion("reduced_volume_equality", "global reduced volume = 1 on flat space", rv.method,
                         c.tolerance("reduced_volume_equality"), 0.0);
    for (std::size_t j = 0; j < rv.taus.size(); ++j) rep.add(0.0, rv.taus[j], -std::abs(rv.V_tangent[j] - 1.0));
    rep.finalize();
    res.checks.push_back(rep);
    res.series.push_back(series_of("reduced_volume", "tau", "V", rv.taus, rv.V_tangent, rep.tolerance, rep));
  }
  {
    SectorRegion sec;
    sec.direction = Vec(n, 0.0);
    sec.direction[0] = 1.0;
    sec.half_angle = 0.7;
    sec.v_max = 1.0;
    const auto sv = reduced_volume(flat, vt, sec);
    auto rep = assertion("sector_volume_constancy", "sector reduced volume is constant in tau on flat space",
                         sv.method, c.tolerance("sector_volume_constancy"), 0.0);
    for (std::size_t j = 0; j < sv.taus.size(); ++j)
      rep.add(0.0, sv.taus[j], -std::abs(sv.V_tangent[j] - sv.V_tangent.front()));
    rep.finalize();
    res.checks.push_back(rep);
    res.series.push_back(series_of("sector_volume", "tau", "V_sector", sv.taus, sv.V_tangent, rep.tolerance, rep));
  }
  {
    const double taus[] = {0.25, 0.5, 1.0, 2.0};
    const double rs[] = {0.3, 0.6, 1.0, 2.0};
    res.checks.push_back(
        subsolution_residual(flat, taus, rs, c.tolerance("barrier_subsolution_equality"), 2e-4, true));
  }

  RadialGrid grid;
  const double taus[] = {0.1, 0.2, 0.5, 1.0, 2.0};
  grid.r_max = boundary_radius(n, taus[4], 1e-12);
  grid.intervals = static_cast<int>(std::ceil(grid.r_max / c.param("grid.h") * c.resolution));
  grid.tau0 = c.param("grid.tau0");
  grid.tau_end = taus[4];
  grid.dtau_rel = c.param("grid.dtau_rel");
  grid.dtau_min = 1e-8;
  grid.dtau_max = 1.0;
  const HeatField field = extrapolated_kernel(flat, grid, taus);
  {
    SampleWindow w;
    w.r_max = 3.0;
    res.checks.push_back(cheeger_yau_check(flat, field, c.tolerance("heat_kernel_lower_bound_equality"), w, true));
  }
  {
    const EntropyReport en = entropy_report(flat, field);
    auto W = assertion("w_entropy_zero", "W = 0 for the flat heat kernel", res.checks.back().resolution,
                       c.tolerance("w_entropy_zero"), 0.0);
    auto N = assertion("nash_entropy_zero", "Nash entropy = 0 for the flat heat kernel", W.resolution,
                       c.tolerance("nash_entropy_zero"), 0.0);
    for (std::size_t j = 0; j < en.taus.size(); ++j) {
      W.add(0.0, en.taus[j], -std::abs(en.W[j]));
      N.add(0.0, en.taus[j], -std::abs(en.N[j]));
    }
    W.finalize();
    N.finalize();
    res.checks.push_back(W);
    res.checks.push_back(N);
    res.series.push_back(series_of("w_entropy", "tau", "W", en.taus, en.W, W.tolerance, W));
  }
  {
    // Static LYH equality on the plane: the evaluator on the exact kernel, and
    // on the extrapolated numerical kernel inside the region where u > floor.
    const auto plane = WarpedModel::euclidean(2, 60.0);
    RadialGrid g2 = grid;
    g2.r_max = boundary_radius(2, taus[4], 1e-12);
    g2.intervals = static_cast<int>(std::ceil(g2.r_max / c.param("grid.h") * c.resolution));
    const HeatField exact =
        tabulate_kernel(plane, g2, taus, [](double r, double tau) { return flat_heat_kernel(2, r, tau); });
    res.checks.push_back(renamed(lyh_check_static(plane, exact, c.tolerance("static_lyh_equality"), true, 1e-30),
                                 "static_lyh_equality"));
    const HeatField num = extrapolated_kernel(plane, g2, taus);
    res.checks.push_back(renamed(
        lyh_check_static(plane, num, c.tolerance("static_lyh_equality_solver"), true, c.param("grid.lyh_floor")),
        "static_lyh_equality_solver"));
  }
  return res;
}

// ---- sphere_full ----------------------------------------------------------

SuiteResult run_sphere(const ExperimentConfig& c) {
  SuiteResult res;
  const double radius = c.param("model.radius");
  const auto S = WarpedModel::sphere(3, radius);
  const double ricci = S.ricci_certificate().min();

  RadialGrid grid;
  grid.r_max = S.r_max();
  grid.intervals = c.scaled("grid.intervals");
  grid.tau0 = c.param("grid.tau0");
  grid.tau_end = 1.0;
  grid.dtau_rel = c.param("grid.dtau_rel");
  grid.dtau_min = 1e-8;
  grid.dtau_max = 1.0;
  const std::vector<double> taus = linspace(0.1, 1.0, 19);
  const HeatField field = fundamental_solution(S, grid, taus);
  const std::string res_tag = "h=" + fmt("%.6g", field.h) + " steps=" + std::to_string(field.steps);

  if (radius == 1.0) {
    auto rep = assertion("s3_kernel_oracle", "numerical kernel vs the closed-form image sum on the unit S^3", res_tag,
                         c.tolerance("s3_kernel_oracle"), ricci);
    for (std::size_t j = 0; j < field.taus.size(); ++j)
      for (std::size_t i = 0; i < field.r.size(); ++i) {
        const double r = field.r[i];
        if (r < 0.1 || r > 2.5) continue;
        const double ex = sphere3_heat_kernel(r, field.taus[j]);
        rep.add(r, field.taus[j], -std::abs(field.u[j][i] / ex - 1.0));
      }
    rep.finalize();
    res.checks.push_back(rep);
  }
  {
    SampleWindow w;
    w.r_max = 2.5 * radius;
    res.checks.push_back(cheeger_yau_check(S, field, c.tolerance("heat_kernel_lower_bound"), w));
  }
  {
    const double rs[] = {0.25, 0.5, 1.0, 1.5, 2.0};
    const double tau_bar = 0.5;
    const auto ir = identity_residuals(S, rs, tau_bar);
    auto g = assertion("gradient_identity", "tau |grad ell|^2 = ell on a static metric", "delta=1e-3",
                       c.tolerance("gradient_identity"), ricci);
    auto t = assertion("time_identity", "tau ell_tau = -ell on a static metric", g.resolution,
                       c.tolerance("time_identity"), ricci);
    auto l = assertion("laplacian_slack", "Delta ell <= n/(2 tau) - tau^(-3/2) I", g.resolution,
                       c.tolerance("laplacian_slack"), ricci, S.ricci_certificate().nonnegative());
    Table tab;
    tab.name = "identity_residuals";
    tab.tag = "ell identities along radial L-geodesics at tau=0.5";
    tab.columns = {"r", "gradient", "time", "laplacian", "slack", "slack_tau_inverse"};
    for (const auto& x : ir) {
      g.add(x.r, tau_bar, -x.gradient);
      t.add(x.r, tau_bar, -x.time);
      l.add(x.r, tau_bar, x.slack);
      tab.rows.push_back({x.r, x.gradient, x.time, x.laplacian, x.slack, x.slack_alt});
    }
    g.finalize();
    t.finalize();
    l.finalize();
    res.checks.push_back(g);
    res.checks.push_back(t);
    res.checks.push_back(l);
    res.tables.push_back(tab);
  }
  {
    const double ts[] = {0.25, 0.5, 1.0};
    const double rs[] = {0.3, 0.6, 1.0, 1.5};
    res.checks.push_back(subsolution_residual(S, ts, rs, c.tolerance("barrier_subsolution")));
  }
  {
    auto mono = assertion("integrand_monotonicity", "d/dtau [(4 pi tau)^(-n/2) e^(-ell) J] <= 0 along L-geodesics",
                          "delta=1e-5", c.tolerance("integrand_monotonicity"), ricci,
                          S.ricci_certificate().nonnegative());
    Table tab;
    tab.name = "log_jacobian_bound";
    tab.tag = "margin of d/dtau log J against the bound, two normalisations of the curvature integral";
    tab.columns = {"speed", "tau", "margin_tau_three_halves", "margin_tau_inverse"};
    const double taus_a14[] = {0.1, 0.2, 0.4, 0.6};
    for (double speed : {0.5, 1.0, 1.5}) {
      const auto ic = integrand_derivative_check(S, speed, taus_a14, mono.tolerance);
      for (const auto& row : ic.monotone.rows) mono.add(speed, row.tau, row.margin);
      for (std::size_t k = 0; k < ic.log_jacobian.rows.size(); ++k)
        tab.rows.push_back({speed, ic.log_jacobian.rows[k].tau, ic.log_jacobian.rows[k].margin,
                            ic.log_jacobian_alt.rows[k].margin});
    }
    mono.finalize();
    res.checks.push_back(mono);
    res.tables.push_back(tab);
  }

  const std::vector<double> vt = linspace(0.05, 2.0, 40);
  {
    const auto rv = reduced_volume(S, vt);
    auto mono = monotonicity_report("reduced_volume_monotone", rv, c.tolerance("reduced_volume_monotone"),
                                    S.ricci_certificate().nonnegative());
    mono.ricci_min = ricci;
    res.checks.push_back(mono);
    res.series.push_back(series_of("reduced_volume", "tau", "V", rv.taus, rv.V_tangent, mono.tolerance, mono));
    auto gap = assertion("reduced_volume_cross_check", "tangent-side and manifold-side reduced volume agree",
                         rv.method, c.tolerance("reduced_volume_cross_check"), ricci);
    for (std::size_t j = 0; j < rv.taus.size(); ++j) gap.add(0.0, rv.taus[j], -rv.gap[j]);
    gap.finalize();
    res.checks.push_back(gap);

    SectorRegion sec;
    sec.direction = {1.0, 0.0, 0.0};
    sec.half_angle = 0.7;
    sec.v_max = 1.0;
    const auto sv = reduced_volume(S, vt, sec);
    auto smono = monotonicity_report("sector_volume_monotone", sv, c.tolerance("sector_volume_monotone"),
                                     S.ricci_certificate().nonnegative());
    smono.ricci_min = ricci;
    res.checks.push_back(smono);
    res.series.push_back(series_of("sector_volume", "tau", "V_sector", sv.taus, sv.V_tangent, smono.tolerance, smono));
  }
  {
    const EntropyReport en = entropy_report(S, field);
    auto w = monotonicity_report("w_entropy_monotone", en, EntropyQuantity::W, c.tolerance("w_entropy_monotone"));
    auto nn = monotonicity_report("nash_entropy_monotone", en, EntropyQuantity::N, c.tolerance("nash_entropy_monotone"));
    w.ricci_min = nn.ricci_min = ricci;
    res.checks.push_back(w);
    res.checks.push_back(nn);
    res.series.push_back(series_of("w_entropy", "tau", "W", en.taus, en.W, w.tolerance, w));
    res.series.push_back(series_of("nash_entropy", "tau", "N", en.taus, en.N, nn.tolerance, nn));
    auto q = assertion("entropy_quadrature_gap", "Simpson and trapezoid entropy integrals agree", res_tag,
                       c.tolerance("entropy_quadrature_gap"), ricci);
    for (std::size_t j = 0; j < en.taus.size(); ++j) {
      q.add(0.0, en.taus[j], -std::abs(en.W[j] - en.W_trapezoid[j]));
      q.add(1.0, en.taus[j], -std::abs(en.N[j] - en.N_trapezoid[j]));
    }
    q.finalize();
    res.checks.push_back(q);
  }
  {
    auto conj = assertion("conjugate_point", "first Jacobian zero at |v| sigma = pi rho", "bisection",
                          c.tolerance("conjugate_point"), ricci);
    conj.add(0.0, 0.0, -std::abs(first_conjugate_arc(S) - pi * radius));
    for (double speed : {0.5, 1.0, 2.0}) {
      const auto track = jacobian_along(S, speed, 4.0, 256);
      conj.add(speed, 0.0, -std::abs(speed * track.conjugate_sigma - pi * radius));
    }
    conj.finalize();
    res.checks.push_back(conj);

    auto cut = assertion("cut_threshold", "minimising threshold C(sigma) = pi rho / sigma", "bisection",
                         c.tolerance("cut_threshold"), ricci);
    const Vec dirs[] = {{1.0, 0.0, 0.0}, {0.0, 0.6, 0.8}};
    for (double sb : {1.0, 2.0, 3.0}) {
      const auto ms = minimality_sets(S, sb, dirs);
      for (const auto& e : ms.entries) cut.add(sb, sb * sb / 4.0, -std::abs(e.c_max - pi * radius / sb));
    }
    cut.finalize();
    res.checks.push_back(cut);

    auto jac = assertion("jacobian_fd", "finite-difference Jacobian of L exp matches J", "step=1e-5",
                         c.tolerance("jacobian_fd"), ricci);
    const double sb = 2.0;
    const double speed = 0.5 * pi * radius / sb;
    for (const Vec& d : {Vec{1.0, 0.0, 0.0}, Vec{0.0, 0.6, 0.8}, Vec{0.48, 0.6, 0.64}}) {
      Vec v(3);
      for (int i = 0; i < 3; ++i) v[i] = speed * d[i];
      const double J = jacobian_at(S, speed, sb);
      const double Jfd = jacobian_by_differences(S, v, sb * sb / 4.0, 1e-5);
      jac.add(speed * sb, sb * sb / 4.0, -std::abs(Jfd / J - 1.0));
    }
    jac.finalize();
    res.checks.push_back(jac);
  }
  return res;
}

// ---- hyperbolic_witness ---------------------------------------------------

SuiteResult run_hyperbolic(const ExperimentConfig& c) {
  SuiteResult res;
  const double scale = c.param("model.scale");
  const auto Hm = WarpedModel::hyperbolic(3, scale, 60.0);
  const double ricci = Hm.ricci_certificate().min();
  const double witness = c.param("model.witness_size");
  const double taus[] = {0.1, 0.2, 0.5, 1.0};

  RadialGrid grid;
  grid.r_max = std::min(boundary_radius(3, 1.0, 1e-12), 40.0);
  grid.intervals = static_cast<int>(std::ceil(grid.r_max / c.param("grid.h") * c.resolution));
  grid.tau0 = c.param("grid.tau0");
  grid.tau_end = 1.0;
  grid.dtau_rel = c.param("grid.dtau_rel");
  grid.dtau_min = 1e-8;
  grid.dtau_max = 1.0;

  // Lower bound on the closed-form kernel, and on the solver output.
  SampleWindow w;
  w.r_max = 2.5;
  InequalityReport a1;
  if (scale == 1.0) {
    const HeatField exact = tabulate_kernel(Hm, grid, taus, hyperbolic3_heat_kernel);
    a1 = cheeger_yau_check(Hm, exact, c.tolerance("heat_kernel_lower_bound"), w);
    a1.resolution += " closed-form";
    res.checks.push_back(a1);
  }
  const HeatField field = fundamental_solution(Hm, grid, taus);
  auto a1n = renamed(cheeger_yau_check(Hm, field, c.tolerance("heat_kernel_lower_bound"), w),
                     "heat_kernel_lower_bound_solver");
  res.checks.push_back(a1n);
  if (scale == 1.0) {
    auto rep = assertion("h3_kernel_oracle", "numerical kernel vs the closed-form H^3 kernel", a1n.resolution,
                         c.tolerance("h3_kernel_oracle"), ricci);
    for (std::size_t j = 0; j < field.taus.size(); ++j)
      for (std::size_t i = 0; i < field.r.size(); ++i) {
        const double r = field.r[i];
        if (r < 0.1 || r > 2.5) continue;
        rep.add(r, field.taus[j], -std::abs(field.u[j][i] / hyperbolic3_heat_kernel(r, field.taus[j]) - 1.0));
      }
    rep.finalize();
    res.checks.push_back(rep);
  } else {
    a1 = a1n;
  }

  const double ts[] = {0.25, 0.5, 1.0};
  const double rs[] = {0.3, 0.6, 1.0, 1.5};
  const auto sub = subsolution_residual(Hm, ts, rs, c.tolerance("barrier_subsolution"));
  res.checks.push_back(sub);

  SectorRegion sec;
  sec.direction = {1.0, 0.0, 0.0};
  sec.half_angle = 0.7;
  sec.v_max = 1.0;
  const std::vector<double> vt = linspace(0.05, 2.0, 40);
  const auto sv = reduced_volume(Hm, vt, sec);
  auto smono = monotonicity_report("sector_volume_monotone", sv, c.tolerance("sector_volume_monotone"),
                                   Hm.ricci_certificate().nonnegative());
  smono.ricci_min = ricci;
  res.checks.push_back(smono);
  res.series.push_back(series_of("sector_volume", "tau", "V_sector", sv.taus, sv.V_tangent, smono.tolerance, smono));

  // The witnesses themselves are asserted: each failure must be at least witness_size.
  const auto witness_report = [&](const std::string& name, const std::string& tag, const InequalityReport& src,
                                  double size) {
    auto r = assertion(name, tag, src.resolution, c.tolerance("witness"), ricci);
    const auto& worst = src.worst_row();
    r.add(worst.location, worst.tau, size - witness);
    r.finalize();
    return r;
  };
  res.checks.push_back(witness_report("lower_bound_failure_witness", "heat kernel drops below the flat kernel",
                                      a1, -a1.worst_margin));
  res.checks.push_back(witness_report("barrier_failure_witness", "barrier is not a subsolution", sub,
                                      -sub.worst_margin));
  res.checks.push_back(witness_report("sector_increase_witness", "sector reduced volume increases", smono,
                                      -smono.worst_margin));
  for (const InequalityReport* r : std::initializer_list<const InequalityReport*>{&a1, &sub, &smono})
    res.notes.push_back(r->check + ": " + to_string(r->verdict) + ", witness " + fmt("%.6e", -r->worst_margin) +
                        " at location " + fmt("%.6g", r->worst_row().location) + ", tau " +
                        fmt("%.6g", r->worst_row().tau));
  return res;
}

// ---- cylinder_collapse ----------------------------------------------------

SuiteResult run_cylinder(const ExperimentConfig& c) {
  SuiteResult res;
  const double r = c.param("model.r");
  std::vector<double> eps;
  for (const char* k : {"model.circumference_1", "model.circumference_2", "model.circumference_3"})
    eps.push_back(c.param(k));
  const CollapseTable tab = kappa_collapse_experiment(eps, r);

  auto kap = assertion("kappa_decreasing", "volume constant kappa decreases along the ladder", "image sum",
                       c.tolerance("kappa_decreasing"), 0.0);
  auto vol = assertion("reduced_volume_decreasing", "reduced volume at kappa^(1/3) r^2 decreases along the ladder",
                       "image sum", c.tolerance("reduced_volume_decreasing"), 0.0);
  for (std::size_t j = 1; j < tab.rows.size(); ++j) {
    kap.add(tab.rows[j].circumference, 0.0, tab.rows[j - 1].kappa - tab.rows[j].kappa);
    vol.add(tab.rows[j].circumference, tab.rows[j].tau, tab.rows[j - 1].reduced_volume - tab.rows[j].reduced_volume);
  }
  kap.finalize();
  vol.finalize();
  auto con = assertion("collapse_constant", "V <= C (sqrt(kappa) + exp(-1/(8 kappa^(1/3)))) with C <= bound",
                       "image sum", c.tolerance("collapse_constant"), 0.0);
  for (const auto& row : tab.rows) con.add(row.circumference, row.tau, c.param("model.constant_bound") - row.ratio);
  con.finalize();
  res.checks.push_back(kap);
  res.checks.push_back(vol);
  res.checks.push_back(con);

  auto cut = assertion("cylinder_cut_threshold", "minimising threshold is half the circumference", "bisection",
                       c.tolerance("cylinder_cut_threshold"), 0.0);
  const Vec dirs[] = {{1.0, 0.0, 0.0}};
  for (double e : eps)
    for (double sb : {1.0, 2.0}) {
      const auto ms = minimality_sets(FlatCylinder{e, 2}, sb, dirs);
      cut.add(e, sb * sb / 4.0, -std::abs(ms.entries[0].c_max * sb - 0.5 * e));
    }
  cut.finalize();
  res.checks.push_back(cut);

  Table t;
  t.name = "collapse_ladder";
  t.tag = "kappa ladder on flat S^1 x R^2";
  t.columns = {"circumference", "kappa", "tau", "reduced_volume", "bound_basis", "ratio"};
  for (const auto& row : tab.rows)
    t.rows.push_back({row.circumference, row.kappa, row.tau, row.reduced_volume, row.bound_basis, row.ratio});
  t.annotations.push_back("empirical_constant=" + fmt("%.17g", tab.constant));
  res.tables.push_back(t);
  res.notes.push_back("empirical collapse constant C = " + fmt("%.6g", tab.constant));
  return res;
}

// ---- kahler_lyh -----------------------------------------------------------

SuiteResult run_kahler(const ExperimentConfig& c) {
  SuiteResult res;
  const double rho0 = c.param("model.rho0");
  const double T = 2.0 * rho0 * rho0;
  const std::vector<double> ts = {0.05 * T / 2, 0.1 * T / 2, 0.2 * T / 2, 0.5 * T / 2, 1.0 * T / 2, 1.5 * T / 2};
  const RoundSpherePath path = evolve_round_flow(rho0, ts);
  const int N = c.scaled("grid.intervals");

  {
    auto flow = assertion("round_flow", "d/dt g = -Ric and int R dmu = 2 pi on the round path", "closed form",
                          c.tolerance("round_flow"), 1.0 / (rho0 * rho0));
    flow.add(0.0, 0.0, -path.flow_residual);
    for (double t : ts) flow.add(1.0, t, -std::abs(path.total_scalar_by_quadrature(t) - 2.0 * pi) / (2.0 * pi));
    flow.finalize();
    res.checks.push_back(flow);
  }
  {
    const std::vector<double> ones(N + 1, 1.0);
    const auto f = solve_forward_conjugate(path, ones, N, ts);
    auto rep = assertion("constant_data_closed_form", "u = rho0^2 / rho(t)^2 from constant data",
                         "intervals=" + std::to_string(N), c.tolerance("constant_data_closed_form"));
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const double exact = rho0 * rho0 / path.rho2(ts[j]);
      double worst = 0.0;
      for (double u : f.u[j]) worst = std::max(worst, std::abs(u - exact));
      rep.add(0.0, ts[j], -worst);
    }
    rep.finalize();
    res.checks.push_back(rep);
  }
  const double width = c.param("model.seed_width");
  const auto delta0 = near_delta_data(rho0, N, width);
  const auto field = solve_forward_conjugate(path, delta0, N, ts);
  {
    auto rep = assertion("conjugate_mass_conservation", "int u dmu_t is constant along the conjugate flow",
                         "intervals=" + std::to_string(N), c.tolerance("conjugate_mass_conservation"));
    for (std::size_t j = 0; j < field.ts.size(); ++j)
      rep.add(0.0, field.ts[j], -std::abs(field.mass[j] - field.initial_mass) / field.initial_mass);
    rep.finalize();
    res.checks.push_back(rep);
  }
  const double t_min = c.param("grid.lyh_t_min");
  const auto lyh_min = [&](const LYHField& l) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < l.ts.size(); ++j)
      if (l.ts[j] >= t_min)
        for (double v : l.M_over_g[j])
          if (!std::isnan(v)) m = std::min(m, v);
    return m;
  };
  const LYHField lyh = lyh_quantity(field, path);
  {
    auto rep = assertion("shrinking_sphere_lyh", "M >= 0 on the round shrinking sphere (reported as M / g)",
                         "intervals=" + std::to_string(N) + " h=" + fmt("%.6g", field.h),
                         c.param("grid.lyh_constant") * field.h * field.h, 1.0 / (rho0 * rho0));
    Table tab;
    tab.name = "lyh_margin";
    tab.tag = "M / g on the theta grid (chart radius r = tan(theta/2))";
    tab.columns = {"t", "r", "M_over_g"};
    std::vector<double> st, sm;
    for (std::size_t j = 0; j < lyh.ts.size(); ++j) {
      if (lyh.ts[j] < t_min) continue;
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < lyh.r.size(); ++i) {
        const double v = lyh.M_over_g[j][i];
        if (std::isnan(v)) continue;
        rep.add(lyh.r[i], lyh.ts[j], v);
        tab.rows.push_back({lyh.ts[j], lyh.r[i], v});
        m = std::min(m, v);
      }
      st.push_back(lyh.ts[j]);
      sm.push_back(m);
    }
    rep.finalize();
    tab.annotations.push_back("min_margin=" + fmt("%.17g", rep.worst_margin));
    res.checks.push_back(rep);
    res.tables.push_back(tab);
    res.series.push_back(series_of("lyh_min_margin", "t", "min M/g", st, sm, rep.tolerance, rep));
  }
  {
    // Resolution study: violation (negative part of min M/g) at h and h/2.
    const auto fine0 = near_delta_data(rho0, 2 * N, width);
    const auto fine = solve_forward_conjugate(path, fine0, 2 * N, ts);
    const auto lf = lyh_quantity(fine, path);
    const double m1 = lyh_min(lyh);
    const double m2 = lyh_min(lf);
    const double v1 = std::max(0.0, -m1);
    const double v2 = std::max(0.0, -m2);
    auto rep = assertion("lyh_violation_scaling", "violation shrinks at least 3x under h -> h/2",
                         "intervals=" + std::to_string(N) + "," + std::to_string(2 * N),
                         c.tolerance("lyh_violation_scaling"), 1.0 / (rho0 * rho0));
    rep.add(field.h, 0.0, v1 / 3.0 - v2);
    rep.finalize();
    res.checks.push_back(rep);
    res.notes.push_back("min M/g: " + fmt("%.9f", m1) + " (h), " + fmt("%.9f", m2) + " (h/2); violation " +
                        fmt("%.3e", v1) + " -> " + fmt("%.3e", v2));
    if (2 * N <= 4000) {
      const auto f4 = solve_forward_conjugate(path, near_delta_data(rho0, 4 * N, width), 4 * N, ts);
      const double m4 = lyh_min(lyh_quantity(f4, path));
      res.notes.push_back("min M/g at h/4: " + fmt("%.9f", m4) + "; successive-difference ratio " +
                          fmt("%.3f", (m2 - m1) / (m4 - m2)));
    }
  }
  {
    const double worst = lyh_v_optimality(field, path, static_cast<int>(c.param("grid.v_samples")), c.seed);
    auto rep = assertion("lyh_v_optimality", "M is the minimum of the raw quadratic form over V",
                         "samples=" + fmt("%.0f", c.param("grid.v_samples")) + " seed=" + std::to_string(c.seed),
                         c.tolerance("lyh_v_optimality"));
    rep.add(0.0, 0.0, -worst);
    rep.finalize();
    res.checks.push_back(rep);
  }
  {
    const ChartPoint pts[] = {{0.0, 0.0}, {0.5, 0.2}, {1.5, -0.7}, {3.0, 1.0}};
    const double tl[] = {0.1, 1.0, 10.0};
    const double h = c.param("grid.chart_h");
    res.checks.push_back(renamed(lyh_check_flat_chart(kahler_flat_kernel, pts, tl, h,
                                                      c.tolerance("flat_kernel_lyh_equality"), true),
                                 "flat_kernel_lyh_equality"));
    res.checks.push_back(renamed(
        lyh_check_flat_chart(
            [](double x, double y, double t) { return kahler_flat_kernel(x - 1.0, y, t) + kahler_flat_kernel(x + 1.0, y, t); },
            pts, tl, h, c.tolerance("flat_chart_lyh"), false),
        "flat_chart_lyh"));
  }
  return res;
}

// ---- subvariety_bezout ----------------------------------------------------

SuiteResult run_subvariety(const ExperimentConfig& c) {
  SuiteResult res;
  HeatComparisonOptions opt;
  opt.intervals = c.scaled("grid.intervals");
  {
    const double ts[] = {0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
    opt.equality = true;
    opt.tolerance = c.tolerance("line_kernel_equality");
    res.checks.push_back(renamed(subvariety_heat_comparison(GraphCurve::monomial(1), ts, opt).report,
                                 "line_kernel_equality"));
  }
  {
    const double ts[] = {1e-3, 1e-2, 1.0};
    opt.equality = false;
    opt.tolerance = c.tolerance("quadric_kernel_comparison");
    const auto q = subvariety_heat_comparison(GraphCurve::monomial(2), ts, opt);
    auto strict = q.report;
    strict.check = "quadric_kernel_comparison";
    res.checks.push_back(strict);
    auto small = assertion("quadric_small_time", "pi t K(0,0,t) -> 1 as t -> 0", q.report.resolution,
                           c.tolerance("quadric_small_time"), 0.0);
    small.add(0.0, q.ts[0], -std::abs(q.scaled[0] - 1.0));
    small.finalize();
    res.checks.push_back(small);
    Table t;
    t.name = "quadric_kernel";
    t.tag = "on-diagonal kernel of the graph of z^2";
    t.columns = {"t", "K", "pi_t_K"};
    for (std::size_t j = 0; j < q.ts.size(); ++j) t.rows.push_back({q.ts[j], q.K[j], q.scaled[j]});
    res.tables.push_back(t);
  }
  {
    auto nu = assertion("lelong_density", "area ratio limit equals 2 deg", "doubling grid, Aitken",
                        c.tolerance("lelong_density"), 0.0);
    Table t;
    t.name = "area_ratio";
    t.tag = "(pi rho^2) A(rho) / V0(rho) on the doubling grid";
    t.columns = {"degree", "rho", "area", "ratio", "nu_hat"};
    for (int d : {1, 2, 3}) {
      const auto e = lelong_number_estimate(GraphCurve::monomial(d), c.param("model.rho_max"), 6,
                                            c.scaled("grid.area_resolution"));
      nu.add(d, 0.0, -std::abs(e.extrapolated / (2.0 * d) - 1.0));
      for (std::size_t j = 0; j < e.series.rho.size(); ++j)
        t.rows.push_back({double(d), e.series.rho[j], e.series.area[j], e.series.ratio[j], e.series.nu_hat[j]});
      res.notes.push_back("degree " + std::to_string(d) + ": nu_hat " + fmt("%.6f", e.nu_hat) + ", extrapolated " +
                          fmt("%.6f", e.extrapolated));
    }
    nu.finalize();
    res.checks.push_back(nu);
    res.tables.push_back(t);
  }
  {
    const double rhos[] = {3.0, 4.0, 5.0, 6.0};
    const auto s = area_function(GraphCurve::exponential(), rhos, c.scaled("grid.exp_resolution"));
    auto inc = assertion("exp_ratio_increasing", "area ratio of the exp graph strictly increases",
                         "angles=radial steps=" + fmt("%.0f", c.param("grid.exp_resolution")),
                         c.tolerance("exp_ratio_increasing"), 0.0);
    if (!s.complete) throw NumericalFailure("exp graph area did not converge");
    for (std::size_t j = 1; j < s.rho.size(); ++j) inc.add(s.rho[j], 0.0, s.ratio[j] - s.ratio[j - 1]);
    inc.finalize();
    res.checks.push_back(inc);
    const auto e = lelong_number_estimate(GraphCurve::exponential(), 16.0, 4, c.scaled("grid.exp_resolution"));
    auto div = assertion("exp_divergence_flag", "ratio series of the exp graph diverges", "doubling grid to 16",
                         c.tolerance("exp_divergence_flag"), 0.0);
    div.add(e.growth_exponent, 0.0, e.diverges ? 1.0 : -1.0);
    div.finalize();
    res.checks.push_back(div);
    res.series.push_back(series_of("exp_area_ratio", "rho", "ratio", s.rho, s.ratio, inc.tolerance, inc));
    res.notes.push_back("exp graph: ratio(6)/ratio(3) = " + fmt("%.6f", s.ratio.back() / s.ratio.front()) +
                        ", growth exponent " + fmt("%.4f", e.growth_exponent));
  }
  {
    auto gate = assertion("inner_radius_gate", "pairs with rho' <= rho / sqrt(6) accepted, larger rejected", "exact",
                          c.tolerance("inner_radius_gate"), 0.0);
    const auto z2 = GraphCurve::monomial(2);
    double worst_q = 0.0;
    Table t;
    t.name = "ratio_pairs";
    t.tag = "A(rho') rho'^2 / V0(rho') against A(rho) rho^2 / V0(rho) for z^2";
    t.columns = {"inner", "outer", "lhs", "rhs_basis", "quotient"};
    for (double base : {1.0, 2.0, 4.0}) {
      const double outer = base * std::sqrt(6.0);
      const auto p = ratio_monotonicity(z2, base, outer);
      worst_q = std::max(worst_q, p.quotient);
      t.rows.push_back({p.inner, p.outer, p.lhs, p.rhs_basis, p.quotient});
      bool rejected = false;
      try {
        (void)ratio_monotonicity(z2, base * (1.0 + 1e-9), outer);
      } catch (const std::invalid_argument&) {
        rejected = true;
      }
      gate.add(base, 0.0, rejected ? 0.0 : -1.0);
    }
    gate.finalize();
    res.checks.push_back(gate);
    res.tables.push_back(t);
    auto bound = assertion("ratio_quotient_bound", "one constant <= 4 bounds every admissible quotient", "exact",
                           c.tolerance("ratio_quotient_bound"), 0.0);
    bound.add(0.0, 0.0, 4.0 - worst_q);
    bound.finalize();
    res.checks.push_back(bound);
  }
  {
    const double rhos[] = {1.0, 2.0, 4.0, 10.0, 30.0, 100.0};
    const auto g = volume_growth_consistency(rhos);
    auto rep = assertion("product_volume_growth", "ball volume in CP^1 x C: V / rho^2 -> 4 pi^2", "quadrature",
                         c.tolerance("product_volume_growth"), 0.0);
    Table t;
    t.name = "product_volume_table";
    t.tag = "ball volumes in CP^1 x C with the round unit factor";
    t.columns = {"rho", "volume", "over_rho2", "over_rho3", "over_rho"};
    for (std::size_t j = 0; j < g.rho.size(); ++j) {
      const double rho = g.rho[j];
      if (rho >= pi) {
        const double closed = 4.0 * pi * pi * (1.0 - (pi * pi - 4.0) / (2.0 * rho * rho));
        rep.add(rho, 0.0, -std::abs(g.over_rho2[j] - closed) / closed);
      }
      t.rows.push_back({rho, g.volume[j], g.over_rho2[j], g.over_rho3[j], g.over_rho[j]});
    }
    rep.finalize();
    res.checks.push_back(rep);
    res.tables.push_back(t);
  }
  return res;
}

std::vector<SuiteSpec> build_registry() {
  std::vector<SuiteSpec> s;
  s.push_back({"flat_sanity",
               "equality cases on flat R^n",
               {{"model.dimension", 3, "dimension n"},
                {"grid.h", 0.01, "coarse radial spacing (a half-spacing solve is added)"},
                {"grid.tau0", 0.05, "seed time"},
                {"grid.dtau_rel", 1e-3, "relative time step"},
                {"grid.lyh_floor", 1e-3, "static LYH on the solver output skips nodes with u below this"}},
               {{"reduced_distance_equality", 1e-6},
                {"reduced_volume_equality", 1e-4},
                {"sector_volume_constancy", 1e-10},
                {"barrier_subsolution_equality", 1e-6},
                {"heat_kernel_lower_bound_equality", 1e-6},
                {"w_entropy_zero", 5e-3},
                {"nash_entropy_zero", 5e-3},
                {"static_lyh_equality", 2e-6},
                {"static_lyh_equality_solver", 1e-4}},
               run_flat});
  s.push_back({"sphere_full",
               "comparison and monotonicity checks on the round S^3",
               {{"model.radius", 1.0, "sphere radius"},
                {"grid.intervals", 2513, "radial cells on [0, pi rho]"},
                {"grid.tau0", 1e-3, "seed time"},
                {"grid.dtau_rel", 2e-3, "relative time step"}},
               {{"s3_kernel_oracle", 1e-3},
                {"heat_kernel_lower_bound", 1e-6},
                {"gradient_identity", 1e-4},
                {"time_identity", 1e-4},
                {"laplacian_slack", 1e-4},
                {"barrier_subsolution", 1e-4},
                {"integrand_monotonicity", 1e-6},
                {"reduced_volume_monotone", 1e-5},
                {"reduced_volume_cross_check", 1e-4},
                {"sector_volume_monotone", 1e-5},
                {"w_entropy_monotone", 1e-4},
                {"nash_entropy_monotone", 1e-4},
                {"entropy_quadrature_gap", 1e-8},
                {"conjugate_point", 1e-6},
                {"cut_threshold", 1e-6},
                {"jacobian_fd", 1e-5}},
               run_sphere});
  s.push_back({"hyperbolic_witness",
               "failures of the comparison statements without Ric >= 0",
               {{"model.scale", 1.0, "curvature -scale^2"},
                {"model.witness_size", 1e-3, "minimum size of each witnessed failure"},
                {"grid.h", 0.00125, "radial spacing"},
                {"grid.tau0", 1e-3, "seed time"},
                {"grid.dtau_rel", 2e-3, "relative time step"}},
               {{"heat_kernel_lower_bound", 1e-6},
                {"h3_kernel_oracle", 1e-3},
                {"barrier_subsolution", 1e-4},
                {"sector_volume_monotone", 1e-5},
                {"witness", 1e-12}},
               run_hyperbolic});
  s.push_back({"cylinder_collapse",
               "collapsing flat cylinders S^1 x R^2",
               {{"model.r", 10.0, "ball radius"},
                {"model.circumference_1", 1.0, ""},
                {"model.circumference_2", 0.3, ""},
                {"model.circumference_3", 0.1, ""},
                {"model.constant_bound", 50.0, "admissible collapse constant"}},
               {{"kappa_decreasing", 1e-12},
                {"reduced_volume_decreasing", 1e-12},
                {"collapse_constant", 1e-12},
                {"cylinder_cut_threshold", 1e-8}},
               run_cylinder});
  s.push_back({"kahler_lyh",
               "matrix LYH estimate along the round shrinking sphere",
               {{"model.rho0", 1.0, "initial radius"},
                {"model.seed_width", 0.01, "width of the near-delta initial data"},
                {"grid.intervals", 400, "theta cells"},
                {"grid.lyh_t_min", 0.1, "earliest time entering the LYH minimum"},
                {"grid.lyh_constant", 1.0, "C in the allowance C h^2"},
                {"grid.v_samples", 20, "random V per node"},
                {"grid.chart_h", 1e-3, "difference step on the flat chart"}},
               {{"round_flow", 1e-10},
                {"constant_data_closed_form", 1e-8},
                {"conjugate_mass_conservation", 1e-6},
                {"lyh_violation_scaling", 1e-12},
                {"lyh_v_optimality", 1e-6},
                {"flat_kernel_lyh_equality", 2e-6},
                {"flat_chart_lyh", 1e-8}},
               run_kahler});
  s.push_back({"subvariety_bezout",
               "heat kernel and area growth of graphs in C^2",
               {{"grid.intervals", 2000, "radial cells per kernel solve"},
                {"grid.area_resolution", 2000, "radial quadrature nodes for monomial areas"},
                {"grid.exp_resolution", 1000, "polar quadrature nodes for the exp graph"},
                {"model.rho_max", 64.0, "largest radius of the doubling grid"}},
               {{"line_kernel_equality", 1e-6},
                {"quadric_kernel_comparison", 1e-12},
                {"quadric_small_time", 0.02},
                {"lelong_density", 0.02},
                {"exp_ratio_increasing", 1e-12},
                {"exp_divergence_flag", 1e-12},
                {"inner_radius_gate", 1e-12},
                {"ratio_quotient_bound", 1e-12},
                {"product_volume_growth", 1e-8}},
               run_subvariety});
  return s;
}

}  // namespace

const std::vector<SuiteSpec>& registered_suites() {
  static const std::vector<SuiteSpec> suites = build_registry();
  return suites;
}

const SuiteSpec* find_suite(const std::string& name) {
  for (const auto& s : registered_suites())
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace hlab
