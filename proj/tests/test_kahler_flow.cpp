#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hlab/kahler_flow.hpp"

using namespace hlab;

TEST_CASE("round shrinking sphere") {
  const std::vector<double> ts{0.0, 0.5, 1.0, 1.9};
  const auto p = evolve_round_flow(1.0, ts);
  CHECK(p.extinction() == 2.0);
  CHECK(p.flow_residual <= 1e-12);
  CHECK(p.scalar(0.0) == doctest::Approx(0.5));
  CHECK(p.ricci(0.3) / p.metric(0.3, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  for (double t : ts) {
    CHECK(p.area(t) == doctest::Approx(4 * pi * (1 - t / 2)).epsilon(1e-14));
    CHECK(p.area_by_quadrature(t) == doctest::Approx(p.area(t)).epsilon(1e-8));
    CHECK(p.total_scalar_by_quadrature(t) == doctest::Approx(2 * pi).epsilon(1e-8));
  }
  // d area / dt = -int R dmu.
  const double d = 1e-4;
  CHECK((p.area(0.7 + d) - p.area(0.7 - d)) / (2 * d) == doctest::Approx(-p.total_scalar_by_quadrature(0.7)).epsilon(1e-7));

  const std::vector<double> bad{0.5, 2.0};
  CHECK_THROWS(evolve_round_flow(1.0, bad));
  CHECK(evolve_round_flow(2.0, ts).extinction() == 8.0);
}

TEST_CASE("forward conjugate flow: closed forms") {
  const std::vector<double> ts{0.05, 0.2, 0.5, 1.0, 1.5};
  const auto p = evolve_round_flow(1.0, ts);
  const int N = 400;
  const std::vector<double> ones(N + 1, 1.0);
  const auto f = solve_forward_conjugate(p, ones, N, ts);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (double u : f.u[j]) CHECK(std::abs(u - 2 / (2 - ts[j])) <= 1e-8);
    CHECK(f.mass[j] == doctest::Approx(4 * pi).epsilon(1e-10));
  }

  // cos(theta) is a first eigenfunction: Delta_K cos = -cos / (2 rho^2) cancels
  // the reaction term, so u = 2 rho0^2 / rho^2 + cos(theta) exactly.
  std::vector<double> u0(N + 1);
  for (int i = 0; i <= N; ++i) u0[i] = 2.0 + std::cos(pi * i / N);
  const auto g = solve_forward_conjugate(p, u0, N, ts);
  double worst = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j)
    for (int i = 0; i <= N; ++i)
      worst = std::max(worst, std::abs(g.u[j][i] - (4 / (2 - ts[j]) + std::cos(g.theta[i]))));
  CHECK(worst <= 1e-4);
  CHECK(g.max_mass_drift() <= 1e-6);

  // The Riemannian scalar curvature in the reaction term breaks conservation.
  ConjugateSolveOptions o;
  o.convention = ScalarConvention::riemannian;
  o.enforce_mass = false;
  CHECK(solve_forward_conjugate(p, ones, N, ts, o).max_mass_drift() > 1e-2);
  o.enforce_mass = true;
  CHECK_THROWS(solve_forward_conjugate(p, ones, N, ts, o));

  std::vector<double> neg = ones;
  neg[5] = -1.0;
  CHECK_THROWS(solve_forward_conjugate(p, neg, N, ts));
}

TEST_CASE("near-delta data") {
  const std::vector<double> ts{0.05, 0.1, 0.5, 1.0};
  const auto p = evolve_round_flow(1.0, ts);
  const auto u0 = near_delta_data(1.0, 400, 0.01);
  const auto f = solve_forward_conjugate(p, u0, 400, ts);
  CHECK(f.initial_mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.max_mass_drift() <= 1e-6);

  const auto lyh = lyh_quantity(f, p);
  CHECK(lyh.min_margin >= -lyh.h * lyh.h);
  const auto f2 = solve_forward_conjugate(p, near_delta_data(1.0, 800, 0.01), 800, ts);
  const auto l2 = lyh_quantity(f2, p);
  CHECK(l2.min_margin >= -l2.h * l2.h);
  CHECK(std::max(0.0, -l2.min_margin) <= std::max(0.0, -lyh.min_margin) / 3 + 1e-15);

  CHECK(lyh_v_optimality(f, p, 20, 42) <= 1e-8);
}

TEST_CASE("LYH quantity on constant data") {
  const std::vector<double> ts{0.1, 0.5, 1.0, 1.5};
  const auto p = evolve_round_flow(1.0, ts);
  const std::vector<double> ones(201, 1.0);
  const auto l = lyh_quantity(solve_forward_conjugate(p, ones, 200, ts), p);
  for (std::size_t j = 0; j < ts.size(); ++j)
    for (std::size_t i = 0; i < l.r.size(); ++i) {
      if (std::isnan(l.M_over_g[j][i])) continue;
      CHECK(l.M_over_g[j][i] == doctest::Approx(1 / ts[j] + p.scalar(ts[j])).epsilon(1e-8));
      CHECK(l.M[j][i] == doctest::Approx(p.metric(l.r[i], ts[j]) * (1 / ts[j] + p.scalar(ts[j]))).epsilon(1e-8));
    }
  std::ostringstream out;
  write_lyh_csv(out, l);
  CHECK(out.str().rfind("t,r,M\n", 0) == 0);
}

TEST_CASE("the optimal V minimises the raw form (random)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.1, 3.0), any(-2.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    const double u = pos(rng), g = pos(rng), R = pos(rng), t = pos(rng), uzz = any(rng);
    const std::complex<double> uz(any(rng), any(rng)), V(any(rng), any(rng));
    const double M = uzz / u - std::norm(uz) / (u * u) + g / t + R;
    CHECK(lyh_raw(u, uz, uzz, g, R, t, -uz / u) == doctest::Approx(u * M).epsilon(1e-12));
    CHECK(lyh_raw(u, uz, uzz, g, R, t, V) >= u * M - 1e-10);
  }
}

TEST_CASE("static LYH on flat charts and surfaces") {
  const ChartPoint pts[] = {{0.0, 0.0}, {0.5, 0.2}, {1.5, -0.7}, {3.0, 1.0}};
  const double tl[] = {0.1, 0.3, 1.0, 3.0, 10.0};
  const auto eq = lyh_check_flat_chart(kahler_flat_kernel, pts, tl, 1e-3, 2e-6, true);
  CHECK(eq.holds());
  const auto two = lyh_check_flat_chart(
      [](double x, double y, double t) { return kahler_flat_kernel(x - 1, y, t) + kahler_flat_kernel(x + 1, y, t); },
      pts, tl, 1e-3, 1e-5);
  CHECK(two.holds());
  // Between the two centres the margin is strictly positive; far away one
  // Gaussian dominates and the margin tends to zero.
  const ChartPoint mid[] = {{0.0, 0.0}, {0.0, 0.5}};
  const double early[] = {0.3, 1.0, 3.0};
  const auto inner = lyh_check_flat_chart(
      [](double x, double y, double t) { return kahler_flat_kernel(x - 1, y, t) + kahler_flat_kernel(x + 1, y, t); },
      mid, early, 1e-3, 1e-5);
  CHECK(inner.worst_margin > 1e-3);
  CHECK(kahler_flat_kernel(0.3, 0.4, 2.0) == doctest::Approx(std::exp(-0.125) / (2 * pi)).epsilon(1e-14));

  const auto plane = WarpedModel::euclidean(2, 20.0);
  RadialGrid g;
  g.r_max = 20.0;
  g.intervals = 4000;
  const double taus[] = {kahler_to_riemannian_time(0.5), kahler_to_riemannian_time(2.0)};
  const auto k = tabulate_kernel(plane, g, taus, [](double r, double tau) { return flat_heat_kernel(2, r, tau); });
  const auto s = lyh_check_static(plane, k, 2e-6, true, 1e-200);
  CHECK(s.holds());

  const auto cap = WarpedModel::hyperbolic(2, 1.0, 3.0);
  RadialGrid hg;
  hg.r_max = 3.0;
  hg.intervals = 600;
  const auto hk = tabulate_kernel(cap, hg, taus, [](double r, double tau) { return flat_heat_kernel(2, r, tau); });
  CHECK(lyh_check_static(cap, hk, 1e-6).verdict == Verdict::hypothesis_not_met);
}
