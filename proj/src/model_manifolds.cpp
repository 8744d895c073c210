#include "hlab/model_manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace hlab {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::euclidean: return "euclidean";
    case ModelKind::sphere: return "sphere";
    case ModelKind::hyperbolic: return "hyperbolic";
    case ModelKind::custom: return "custom";
  }
  return "unknown";
}

ProfileTable read_profile_table(std::istream& in) {
  ProfileTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double r = 0.0;
    double phi = 0.0;
    if (!(fields >> r)) continue;
    if (!(fields >> phi))
      throw std::invalid_argument("profile table line " + std::to_string(line_no) +
                                  ": expected two columns");
    table.r.push_back(r);
    table.phi.push_back(phi);
  }
  return table;
}

ProfileTable read_profile_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile table " + path);
  return read_profile_table(in);
}

WarpedModel::WarpedModel(ModelKind kind, int n, double r_max, double parameter)
    : kind_(kind), n_(n), r_max_(r_max), parameter_(parameter) {
  if (n < 2) throw std::invalid_argument("WarpedModel: dimension must be >= 2");
  if (!(r_max > 0.0)) throw std::invalid_argument("WarpedModel: r_max must be positive");
}

WarpedModel WarpedModel::euclidean(int n, double r_max) {
  WarpedModel m(ModelKind::euclidean, n, r_max, 0.0);
  m.certify(default_certificate_nodes);
  return m;
}

WarpedModel WarpedModel::sphere(int n, double radius, double r_max) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
  const double antipode = pi * radius;
  if (r_max == 0.0) r_max = antipode;
  if (r_max > antipode * (1.0 + 1e-14))
    throw std::invalid_argument("sphere: r_max beyond the antipode pi * rho");
  WarpedModel m(ModelKind::sphere, n, std::min(r_max, antipode), radius);
  m.certify(default_certificate_nodes);
  return m;
}

WarpedModel WarpedModel::hyperbolic(int n, double scale, double r_max) {
  if (!(scale > 0.0)) throw std::invalid_argument("hyperbolic: scale must be positive");
  WarpedModel m(ModelKind::hyperbolic, n, r_max, scale);
  m.certify(default_certificate_nodes);
  return m;
}

WarpedModel WarpedModel::custom(int n, const ProfileTable& table, int certificate_nodes) {
  if (table.r.size() != table.phi.size() || table.r.size() < 4)
    throw std::invalid_argument("custom profile: need at least four (r, phi) rows");
  if (std::abs(table.r.front()) > 1e-12 || std::abs(table.phi.front()) > 1e-8)
    throw std::invalid_argument("custom profile: pole condition phi(0) = 0 violated");
  const double r1 = table.r[1];
  // phi(h)/h - 1 = O(h^2) for a smooth pole; allow a generous curvature bound.
  if (std::abs(table.phi[1] / r1 - 1.0) > std::max(1e-6, 10.0 * r1 * r1))
    throw std::invalid_argument("custom profile: pole condition phi'(0) = 1 violated");
  for (std::size_t i = 1; i < table.phi.size(); ++i)
    if (!(table.phi[i] > 0.0))
      throw std::invalid_argument("custom profile: phi must be positive away from the pole");
  WarpedModel m(ModelKind::custom, n, table.r.back(), 0.0);
  m.spline_ = std::make_shared<const CubicSpline>(table.r, table.phi, 1.0);
  m.certify(certificate_nodes);
  return m;
}

WarpedModel build_model(ModelKind kind, int n, double r_max, double parameter,
                        const std::optional<ProfileTable>& table, int certificate_nodes) {
  switch (kind) {
    case ModelKind::euclidean: return WarpedModel::euclidean(n, r_max);
    case ModelKind::sphere: return WarpedModel::sphere(n, parameter, r_max);
    case ModelKind::hyperbolic: return WarpedModel::hyperbolic(n, parameter, r_max);
    case ModelKind::custom:
      if (!table) throw std::invalid_argument("custom model requires a profile table");
      return WarpedModel::custom(n, *table, certificate_nodes);
  }
  throw std::invalid_argument("unknown model kind");
}

double WarpedModel::phi(double r) const {
  switch (kind_) {
    case ModelKind::euclidean: return r;
    case ModelKind::sphere: return parameter_ * std::sin(r / parameter_);
    case ModelKind::hyperbolic: return std::sinh(parameter_ * r) / parameter_;
    case ModelKind::custom: return spline_->value(r);
  }
  return 0.0;
}

double WarpedModel::dphi(double r) const {
  switch (kind_) {
    case ModelKind::euclidean: return 1.0;
    case ModelKind::sphere: return std::cos(r / parameter_);
    case ModelKind::hyperbolic: return std::cosh(parameter_ * r);
    case ModelKind::custom: return spline_->derivative(r);
  }
  return 0.0;
}

double WarpedModel::d2phi(double r) const {
  switch (kind_) {
    case ModelKind::euclidean: return 0.0;
    case ModelKind::sphere: return -std::sin(r / parameter_) / parameter_;
    case ModelKind::hyperbolic: return parameter_ * std::sinh(parameter_ * r);
    case ModelKind::custom: return spline_->second_derivative(r);
  }
  return 0.0;
}

double WarpedModel::chart_limit() const {
  return kind_ == ModelKind::custom ? r_max_ : std::numeric_limits<double>::infinity();
}

double WarpedModel::conjugate_radius() const {
  return kind_ == ModelKind::sphere ? pi * parameter_ : std::numeric_limits<double>::infinity();
}

double WarpedModel::pole_distance(double arc) const {
  if (kind_ != ModelKind::sphere) return arc;
  const double period = 2.0 * pi * parameter_;
  const double folded = std::fmod(arc, period);
  return std::min(folded, period - folded);
}

CurvatureSample WarpedModel::curvature_from_profile(double r) const {
  const double f = phi(r);
  const double fp = dphi(r);
  const double fpp = d2phi(r);
  CurvatureSample s;
  s.r = r;
  s.sec_radial = -fpp / f;
  s.sec_tangential = (1.0 - fp * fp) / (f * f);
  s.ric_radial = (n_ - 1) * s.sec_radial;
  s.ric_tangential = s.sec_radial + (n_ - 2) * s.sec_tangential;
  return s;
}

CurvatureSample WarpedModel::curvature(double r) const {
  CurvatureSample s;
  s.r = r;
  double sec = 0.0;
  switch (kind_) {
    case ModelKind::euclidean: sec = 0.0; break;
    case ModelKind::sphere: sec = 1.0 / (parameter_ * parameter_); break;
    case ModelKind::hyperbolic: sec = -parameter_ * parameter_; break;
    case ModelKind::custom: return curvature_from_profile(r);
  }
  s.sec_radial = sec;
  s.sec_tangential = sec;
  s.ric_radial = (n_ - 1) * sec;
  s.ric_tangential = (n_ - 1) * sec;
  return s;
}

void WarpedModel::certify(int nodes) {
  if (nodes < 2) throw std::invalid_argument("certificate grid needs at least two nodes");
  certificate_ = {std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(), nodes};
  for (int i = 1; i <= nodes; ++i) {
    const double r = r_max_ * i / nodes;
    if (kind_ == ModelKind::sphere && r >= conjugate_radius()) continue;
    const CurvatureSample s = curvature(r);
    certificate_.min_ric_radial = std::min(certificate_.min_ric_radial, s.ric_radial);
    certificate_.min_ric_tangential = std::min(certificate_.min_ric_tangential, s.ric_tangential);
  }
}

double WarpedModel::measure_density(double r) const {
  return unit_sphere_area(n_ - 1) * std::pow(phi(r), n_ - 1);
}

double ball_volume(const WarpedModel& model, double r) {
  if (!(r > 0.0) || r > model.r_max() * (1.0 + 1e-14))
    throw std::out_of_range("ball_volume: radius outside (0, r_max]");
  const int intervals = 2 * static_cast<int>(std::ceil(std::max(200.0, r / 2e-3) / 2.0));
  const int n = model.dimension();
  const double integral =
      integrate([&](double s) { return std::pow(model.phi(s), n - 1); }, 0.0, r, intervals);
  return unit_sphere_area(n - 1) * integral;
}

BishopGromovSeries bishop_gromov_ratio(const WarpedModel& model, std::span<const double> r_grid) {
  BishopGromovSeries out;
  const int n = model.dimension();
  const double ball = unit_ball_volume(n);
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    if (i > 0 && !(r > r_grid[i - 1]))
      throw std::invalid_argument("bishop_gromov_ratio: grid must increase");
    out.r.push_back(r);
    out.ratio.push_back(ball_volume(model, r) / (ball * std::pow(r, n)));
    out.sector_ratio.push_back(std::pow(model.phi(r) / r, n - 1));
  }
  out.max_forward_difference = -std::numeric_limits<double>::infinity();
  out.max_sector_forward_difference = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < out.r.size(); ++i) {
    out.max_forward_difference = std::max(out.max_forward_difference, out.ratio[i] - out.ratio[i - 1]);
    out.max_sector_forward_difference =
        std::max(out.max_sector_forward_difference, out.sector_ratio[i] - out.sector_ratio[i - 1]);
  }
  out.hypothesis_met = model.ricci_certificate().nonnegative();
  return out;
}

double cylinder_distance(const FlatCylinder& cyl, const CylinderPoint& a, const CylinderPoint& b) {
  if (a.flat.size() != b.flat.size())
    throw std::invalid_argument("cylinder_distance: flat coordinates differ in dimension");
  double flat_sq = 0.0;
  for (std::size_t i = 0; i < a.flat.size(); ++i) flat_sq += (a.flat[i] - b.flat[i]) * (a.flat[i] - b.flat[i]);
  const double eps = cyl.circumference;
  const double dx = eps * (b.angle - a.angle) / (2.0 * pi);
  const long k0 = std::lround(-dx / eps);
  double best = std::numeric_limits<double>::infinity();
  // Images beyond the first one farther than the running minimum are skipped.
  for (long step = 0;; ++step) {
    bool improved_or_close = false;
    for (long k : {k0 + step, k0 - step}) {
      const double offset = std::abs(dx + static_cast<double>(k) * eps);
      if (offset * offset < best) {
        improved_or_close = true;
        best = std::min(best, offset * offset + flat_sq);
      }
      if (step == 0) break;
    }
    if (!improved_or_close && step > 0) break;
  }
  return std::sqrt(best);
}

double cylinder_ball_volume(const FlatCylinder& cyl, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("cylinder_ball_volume: radius must be positive");
  const int k = cyl.flat_dim;
  const double half = std::min(r, 0.5 * cyl.circumference);
  const double ball = unit_ball_volume(k);
  const auto slice = [&](double x) {
    const double rr = std::max(0.0, r * r - x * x);
    return ball * std::pow(rr, 0.5 * k);
  };
  return 2.0 * integrate(slice, 0.0, half, 20000);
}

}  // namespace hlab
