#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hlab/model_manifolds.hpp"

using namespace hlab;

namespace {

// Five-point second difference; independent of the analytic d2phi.
double fd2(const WarpedModel& m, double r, double h = 1e-3) {
  return (-m.phi(r + 2 * h) + 16 * m.phi(r + h) - 30 * m.phi(r) + 16 * m.phi(r - h) - m.phi(r - 2 * h)) /
         (12 * h * h);
}
double fd1(const WarpedModel& m, double r, double h = 1e-3) {
  return (-m.phi(r + 2 * h) + 8 * m.phi(r + h) - 8 * m.phi(r - h) + m.phi(r - 2 * h)) / (12 * h);
}

ProfileTable tabulate(const std::function<double(double)>& f, double r_max, int rows) {
  ProfileTable t;
  for (int i = 0; i <= rows; ++i) {
    const double r = r_max * i / rows;
    t.r.push_back(r);
    t.phi.push_back(f(r));
  }
  return t;
}

}  // namespace

TEST_CASE("unit sphere areas match the gamma-function formula") {
  for (int k = 0; k <= 9; ++k) {
    const double oracle = 2 * std::pow(pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
    CHECK(unit_sphere_area(k) == doctest::Approx(oracle).epsilon(1e-14));
  }
  CHECK(unit_ball_volume(3) == doctest::Approx(4 * pi / 3).epsilon(1e-14));
}

TEST_CASE("constant-curvature models carry the exact Ricci entries") {
  const auto flat = build_model(ModelKind::euclidean, 3, 10);
  for (double r : {0.1, 1.0, 5.0, 9.9}) {
    const auto c = flat.curvature(r);
    CHECK(c.ric_radial == 0.0);
    CHECK(c.ric_tangential == 0.0);
    CHECK(c.sec_tangential == 0.0);
  }
  CHECK(flat.ricci_certificate().nonnegative());

  const auto s3 = build_model(ModelKind::sphere, 3, pi, 1.0);
  for (double r : {0.2, 1.0, 2.0, 3.0}) {
    const auto c = s3.curvature(r);
    CHECK(c.ric_radial == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.sec_radial == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.sec_tangential == doctest::Approx(1.0).epsilon(1e-10));
  }
  const auto s_half = build_model(ModelKind::sphere, 4, 2.0, 2.0);
  CHECK(s_half.curvature(1.3).sec_tangential == doctest::Approx(0.25).epsilon(1e-10));

  const auto h3 = build_model(ModelKind::hyperbolic, 3, 5, 1.0);
  CHECK(h3.curvature(1.0).ric_radial == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(h3.ricci_certificate().min() < 0.0);
  CHECK_FALSE(h3.ricci_certificate().nonnegative());
}

TEST_CASE("finite differences of phi reproduce the analytic curvature") {
  for (const auto& m : {build_model(ModelKind::sphere, 3, pi, 1.0), build_model(ModelKind::hyperbolic, 3, 5, 0.7),
                        build_model(ModelKind::sphere, 5, 3.0, 1.5)}) {
    for (double r : {0.3, 0.9, 1.7, 2.4}) {
      const double p = m.phi(r), dp = fd1(m, r), ddp = fd2(m, r);
      const auto c = m.curvature(r);
      CHECK(std::abs(-ddp / p - c.sec_radial) <= 1e-8);
      CHECK(std::abs((1 - dp * dp) / (p * p) - c.sec_tangential) <= 1e-8);
    }
  }
}

TEST_CASE("model construction errors") {
  CHECK_THROWS(build_model(ModelKind::euclidean, 1, 1.0));
  CHECK_THROWS(build_model(ModelKind::sphere, 3, 3.5, 1.0));
  auto bad_slope = tabulate([](double r) { return 2 * r; }, 2.0, 200);
  CHECK_THROWS(WarpedModel::custom(3, bad_slope));
  auto bad_pole = tabulate([](double r) { return r + 0.1; }, 2.0, 200);
  CHECK_THROWS(WarpedModel::custom(3, bad_pole));
  auto negative = tabulate([](double r) { return std::sin(r); }, 4.0, 400);
  CHECK_THROWS(WarpedModel::custom(3, negative));
  CHECK_THROWS(ball_volume(build_model(ModelKind::euclidean, 3, 2.0), 2.5));
  CHECK_THROWS(ball_volume(build_model(ModelKind::euclidean, 3, 2.0), 0.0));
}

TEST_CASE("ball volumes") {
  CHECK(std::abs(ball_volume(build_model(ModelKind::euclidean, 3, 10), 1.0) - 4 * pi / 3) <= 1e-10);
  CHECK(std::abs(ball_volume(build_model(ModelKind::sphere, 2, pi, 1.0), pi) - 4 * pi) <= 1e-8);
  const double r = 1.0;
  CHECK(std::abs(ball_volume(build_model(ModelKind::sphere, 3, pi, 1.0), r) - 2 * pi * (r - std::sin(r) * std::cos(r))) <=
        1e-8);
  // H^3: 4 pi int sinh^2 = pi (sinh 2r - 2r).
  CHECK(ball_volume(build_model(ModelKind::hyperbolic, 3, 3, 1.0), 2.0) ==
        doctest::Approx(pi * (std::sinh(4.0) - 4.0)).epsilon(1e-9));
}

TEST_CASE("Bishop-Gromov ratio series") {
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(0.1 + (pi - 0.2) * i / 60);

  const auto flat = bishop_gromov_ratio(build_model(ModelKind::euclidean, 3, 10), grid);
  CHECK(flat.max_forward_difference <= 1e-12);
  for (double v : flat.ratio) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.hypothesis_met);

  const auto sph = bishop_gromov_ratio(build_model(ModelKind::sphere, 3, pi, 1.0), grid);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(sph.ratio[i] < sph.ratio[i - 1]);
    CHECK(sph.sector_ratio[i] < sph.sector_ratio[i - 1]);
  }
  CHECK(sph.non_increasing(1e-12));

  const auto hyp = bishop_gromov_ratio(build_model(ModelKind::hyperbolic, 3, 5, 1.0), grid);
  CHECK_FALSE(hyp.hypothesis_met);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(hyp.ratio[i] > hyp.ratio[i - 1]);
}

TEST_CASE("custom profiles: spline, file format and pole regularity") {
  std::istringstream in("# r phi\n0 0\n\n0.5 0.479425538604203  # sin\n1.0 0.841470984807897\n");
  const auto t = read_profile_table(in);
  REQUIRE(t.r.size() == 3);
  CHECK(t.phi[2] == doctest::Approx(std::sin(1.0)));

  // Paraboloid-type profile r (1 + r^2)^{-1/4}: phi ~ r^{1/2} at infinity.
  const auto f = [](double r) { return r * std::pow(1 + r * r, -0.25); };
  const auto m = WarpedModel::custom(3, tabulate(f, 20.0, 4000));
  CHECK(m.kind() == ModelKind::custom);
  for (double r : {0.01, 0.5, 3.0, 19.0}) CHECK(m.phi(r) == doctest::Approx(f(r)).epsilon(1e-6));
  for (double h : {1e-3, 2e-3, 4e-3}) CHECK(std::abs(m.phi(h) / h - 1) <= 1.0 * h * h);
  CHECK(m.ricci_certificate().nonnegative(1e-6));

  // Spline curvature of a tabulated sphere approximates 1.
  const auto s = WarpedModel::custom(3, tabulate([](double r) { return std::sin(r); }, 2.5, 2500));
  CHECK(s.curvature(1.2).sec_radial == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("cylinder distance") {
  const FlatCylinder c1{1.0, 2};
  CHECK(cylinder_distance(c1, {0.0, {0, 0}}, {pi, {0, 0}}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cylinder_distance(c1, {0.0, {0, 0}}, {0.0, {3, 0}}) == doctest::Approx(3.0).epsilon(1e-14));
  const FlatCylinder c2{0.1, 2};
  CHECK(cylinder_distance(c2, {0.0, {0, 0}}, {pi, {1, 0}}) ==
        doctest::Approx(std::sqrt(1 + 0.05 * 0.05)).epsilon(1e-14));
}

TEST_CASE("cylinder distance is a metric on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-10.0, 10.0), x(-3.0, 3.0), eps(0.05, 4.0);
  for (int trial = 0; trial < 400; ++trial) {
    const FlatCylinder c{eps(rng), 2};
    const CylinderPoint a{ang(rng), {x(rng), x(rng)}}, b{ang(rng), {x(rng), x(rng)}}, d{ang(rng), {x(rng), x(rng)}};
    const double ab = cylinder_distance(c, a, b), bd = cylinder_distance(c, b, d), ad = cylinder_distance(c, a, d);
    CHECK(ad <= ab + bd + 1e-12);
    CHECK(ab == doctest::Approx(cylinder_distance(c, b, a)).epsilon(1e-14));
    CHECK(cylinder_distance(c, a, a) <= 1e-12);
  }
}

TEST_CASE("cylinder ball volume against the fundamental-domain closed form") {
  // For r >= eps/2 every circle coordinate |theta| <= eps/2 contributes a disc.
  for (double eps : {1.0, 0.3, 0.1}) {
    const double r = 10.0;
    const double oracle = pi * (r * r * eps - eps * eps * eps / 12.0);
    CHECK(cylinder_ball_volume({eps, 2}, r) == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK(cylinder_ball_volume({10.0, 2}, 1.0) == doctest::Approx(4 * pi / 3).epsilon(1e-9));
}
