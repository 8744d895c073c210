#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hlab/subvariety_suite.hpp"

using namespace hlab;

namespace {

// Closed-form monomial area: the region is |z| <= x with x^2 + x^{2d} = rho^2
// and int lambda dA = pi x^2 + pi d x^{2d}.
double monomial_area(int d, double rho) {
  const double x = bisect([&](double s) { return s * s + std::pow(s, 2 * d) - rho * rho; }, 0.0, rho);
  return pi * x * x + pi * d * std::pow(x, 2 * d);
}

// Midpoint rule on a Cartesian grid over the square [-rho, rho]^2.
double cartesian_area(const GraphCurve& c, double rho, int n) {
  const double h = 2 * rho / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::complex<double> z(-rho + (i + 0.5) * h, -rho + (j + 0.5) * h);
      if (std::norm(z) + std::norm(c.P(z)) <= rho * rho) s += 1.0 + std::norm(c.dP(z));
    }
  return s * h * h;
}

}  // namespace

TEST_CASE("induced metric") {
  const auto line = induced_graph_metric(GraphCurve::monomial(1));
  CHECK(line({0.3, -2.0}) == doctest::Approx(2.0));
  const auto quad = induced_graph_metric(GraphCurve::monomial(2));
  CHECK(quad({0.6, 0.8}) == doctest::Approx(5.0));
  const auto e = induced_graph_metric(GraphCurve::exponential());
  CHECK(e({1.0, 0.0}) == doctest::Approx(1 + std::exp(2.0)));
  for (double x : {-3.0, 0.0, 2.0}) CHECK(e({x, 1.1}) >= 1.0);
  CHECK_THROWS(GraphCurve::monomial(0));
}

TEST_CASE("graph surfaces") {
  const auto line = graph_surface(GraphCurve::monomial(1), 10.0);
  for (double r : {0.5, 3.0, 9.0}) {
    CHECK(line.phi(r) == doctest::Approx(r).epsilon(1e-9));
    CHECK(std::abs(line.curvature(r).sec_tangential) <= 1e-6);
  }
  // Gauss curvature of a holomorphic graph: -2 |P''|^2 / lambda^3.
  const auto q = graph_surface(GraphCurve::monomial(2), 10.0);
  for (double x : {0.05, 0.3, 1.0}) {
    const double lam = 1 + 4 * x * x;
    const double rho = integrate([](double s) { return std::sqrt(1 + 4 * s * s); }, 0.0, x, 2000);
    CHECK(q.curvature(rho).sec_radial == doctest::Approx(-8.0 / (lam * lam * lam)).epsilon(1e-3));
  }
  CHECK_THROWS(graph_surface(GraphCurve::exponential(), 5.0));
}

TEST_CASE("on-diagonal heat kernel comparison") {
  const std::vector<double> lt{0.1, 0.5, 1.0, 2.0, 4.0};
  HeatComparisonOptions eq;
  eq.equality = true;
  const auto line = subvariety_heat_comparison(GraphCurve::monomial(1), lt, eq);
  CHECK(line.report.holds());
  for (std::size_t j = 0; j < lt.size(); ++j) CHECK(std::abs(line.K[j] - 1 / (pi * lt[j])) <= 1e-6);

  const std::vector<double> qt{1e-3, 1e-2, 1.0};
  const auto q = subvariety_heat_comparison(GraphCurve::monomial(2), qt);
  CHECK(q.K[2] < 1 / pi);
  CHECK(1 / pi - q.K[2] > 0.05);
  CHECK(std::abs(q.scaled[0] - 1) <= 0.02);
  CHECK(std::abs(q.scaled[1] - 1) <= 0.02);
  CHECK(q.scaled[0] > q.scaled[1]);
  CHECK(q.report.holds());
  CHECK_THROWS(subvariety_heat_comparison(GraphCurve::exponential(), qt));
}

TEST_CASE("monomial areas against the closed form") {
  CHECK(graph_area(GraphCurve::monomial(1), 3.0, 2000) == doctest::Approx(9 * pi).epsilon(1e-12));
  for (int d : {2, 3, 5})
    for (double rho : {0.5, 1.0, 4.0, 30.0})
      CHECK(graph_area(GraphCurve::monomial(d), rho, 2000) == doctest::Approx(monomial_area(d, rho)).epsilon(1e-9));
  CHECK(graph_area(GraphCurve::monomial(2), 30.0, 2000) / (pi * 900) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("area series properties") {
  std::vector<double> rhos;
  for (int i = 1; i <= 40; ++i) rhos.push_back(0.25 * i);
  for (int d : {1, 2, 3}) {
    const auto s = area_function(GraphCurve::monomial(d), rhos);
    for (std::size_t i = 1; i < rhos.size(); ++i) {
      CHECK(s.area[i] >= s.area[i - 1]);
      CHECK(s.area[i] / (pi * rhos[i] * rhos[i]) >= s.area[i - 1] / (pi * rhos[i - 1] * rhos[i - 1]) - 1e-12);
      CHECK(s.nu_hat[i] >= s.ratio[i]);
    }
  }
  std::ostringstream out;
  write_area_csv(out, area_function(GraphCurve::monomial(2), rhos));
  CHECK(out.str().rfind("rho,area,ratio,nu_hat\n", 0) == 0);
}

TEST_CASE("exp graph area against a Cartesian grid") {
  const auto e = GraphCurve::exponential();
  for (double rho : {3.0, 6.0}) {
    const double polar = graph_area(e, rho, 1000);
    CHECK(polar == doctest::Approx(cartesian_area(e, rho, 3000)).epsilon(3e-3));
  }
  const std::vector<double> rhos{3.0, 4.0, 5.0, 6.0};
  const auto s = area_function(e, rhos, 1000);
  for (std::size_t i = 1; i < rhos.size(); ++i) CHECK(s.ratio[i] > s.ratio[i - 1]);
  // The ratio grows, but by well under a factor 2 over [3, 6].
  CHECK(s.ratio.back() / s.ratio.front() == doctest::Approx(1.4368).epsilon(1e-3));
}

TEST_CASE("ratio monotonicity gate") {
  CHECK(admissible_inner_radius(1.0) == 1.0 / std::sqrt(6.0));
  CHECK(admissible_inner_radius(2.0, 2) == doctest::Approx(2.0 / std::sqrt(10.0)));
  const auto line = ratio_monotonicity(GraphCurve::monomial(1), 0.3, 2.0);
  CHECK(line.quotient == doctest::Approx(1.0).epsilon(1e-12));
  double worst = 0.0;
  for (double a : {1.0, 2.0, 4.0}) {
    const auto p = ratio_monotonicity(GraphCurve::monomial(2), a, a * std::sqrt(6.0));
    worst = std::max(worst, p.quotient);
  }
  CHECK(worst <= 4.0);
  CHECK_THROWS(ratio_monotonicity(GraphCurve::monomial(2), 1.0, 2.0));
  CHECK_THROWS(ratio_monotonicity(GraphCurve::monomial(2), 1.01, std::sqrt(6.0)));
}

TEST_CASE("Lelong density") {
  const auto line = lelong_number_estimate(GraphCurve::monomial(1), 64.0);
  CHECK(line.extrapolated == doctest::Approx(2.0).epsilon(0.01));
  CHECK_FALSE(line.diverges);
  for (int d : {2, 3}) {
    const auto e = lelong_number_estimate(GraphCurve::monomial(d), 64.0);
    CHECK(e.extrapolated == doctest::Approx(2.0 * d).epsilon(0.02));
    CHECK_FALSE(e.diverges);
    // Doubling increments shrink geometrically (by about 2 for d = 2 and 2.5 for d = 3).
    const auto& r = e.series.ratio;
    for (std::size_t i = 2; i < r.size(); ++i) CHECK((r[i - 1] - r[i - 2]) / (r[i] - r[i - 1]) > 1.5);
  }
  const auto ex = lelong_number_estimate(GraphCurve::exponential(), 6.0, 4, 1000);
  CHECK(ex.diverges);
}

TEST_CASE("product volume growth") {
  const std::vector<double> rhos{10.0, 20.0, 40.0};
  const auto v = volume_growth_consistency(rhos);
  CHECK(v.limit == doctest::Approx(4 * pi * pi));
  for (double x : v.over_rho2) CHECK(x == doctest::Approx(v.limit).epsilon(0.05));
  CHECK(v.over_rho3[2] < v.over_rho3[1]);
  CHECK(v.over_rho3[1] < v.over_rho3[0]);
  CHECK(v.over_rho[2] > v.over_rho[1]);
  // Closed form for rho >= pi: 4 pi * pi rho^2 - (pi rho^2 - ...) comes from
  // the disc of radius sqrt(rho^2 - d^2) over each point of the sphere at distance d.
  const double rho = 10.0;
  const double exact = integrate([&](double d) { return 2 * pi * std::sin(d) * pi * (rho * rho - d * d); }, 0.0, pi, 4000);
  CHECK(v.volume[0] == doctest::Approx(exact).epsilon(1e-10));
}
