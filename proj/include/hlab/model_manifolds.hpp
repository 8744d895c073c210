#pragma once

#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlab/numerics.hpp"

namespace hlab {

enum class ModelKind { euclidean, sphere, hyperbolic, custom };

std::string to_string(ModelKind kind);

// Sampled warping profile (r, phi). The first row must sit at the pole.
struct ProfileTable {
  std::vector<double> r;
  std::vector<double> phi;
};

// Reads a two-column "r phi" table; '#' starts a comment.
ProfileTable read_profile_table(std::istream& in);
ProfileTable read_profile_table(const std::string& path);

struct CurvatureSample {
  double r = 0.0;
  double ric_radial = 0.0;
  double ric_tangential = 0.0;
  double sec_radial = 0.0;
  double sec_tangential = 0.0;
};

// Grid minimum of both Ricci entries. Not a proof: a dense sample.
struct RicciCertificate {
  double min_ric_radial = 0.0;
  double min_ric_tangential = 0.0;
  int nodes = 0;

  double min() const { return std::min(min_ric_radial, min_ric_tangential); }
  bool nonnegative(double tol = 1e-10) const { return min() >= -tol; }
};

// Rotationally symmetric metric dr^2 + phi(r)^2 g_{S^{n-1}} around a pole.
// Immutable after construction; copies share the spline.
class WarpedModel {
 public:
  static constexpr int default_certificate_nodes = 2048;

  static WarpedModel euclidean(int n, double r_max);
  // Round sphere of radius rho; r_max defaults to the antipode pi * rho.
  static WarpedModel sphere(int n, double radius, double r_max = 0.0);
  // Constant curvature -scale^2.
  static WarpedModel hyperbolic(int n, double scale, double r_max);
  static WarpedModel custom(int n, const ProfileTable& table,
                            int certificate_nodes = default_certificate_nodes);

  int dimension() const { return n_; }
  ModelKind kind() const { return kind_; }
  double r_max() const { return r_max_; }
  double parameter() const { return parameter_; }

  double phi(double r) const;
  double dphi(double r) const;
  double d2phi(double r) const;

  // Largest radius where phi can be evaluated. Analytic kinds extend past
  // r_max (the sphere periodically); custom tables stop at r_max.
  double chart_limit() const;
  // First positive zero of phi, or +inf.
  double conjugate_radius() const;
  // Distance from the pole to the point at unfolded arc length s along a
  // radial geodesic.
  double pole_distance(double arc) const;
  bool compact() const { return kind_ == ModelKind::sphere; }

  CurvatureSample curvature(double r) const;
  // Curvature from phi, phi', phi'' regardless of kind.
  CurvatureSample curvature_from_profile(double r) const;
  const RicciCertificate& ricci_certificate() const { return certificate_; }

  // Riemannian measure density omega_{n-1} phi(r)^{n-1}.
  double measure_density(double r) const;

 private:
  WarpedModel(ModelKind kind, int n, double r_max, double parameter);
  void certify(int nodes);

  ModelKind kind_;
  int n_;
  double r_max_;
  double parameter_;
  std::shared_ptr<const CubicSpline> spline_;
  RicciCertificate certificate_;
};

// Dispatches to the named constructors; `parameter` is the sphere radius or
// hyperbolic scale and is ignored otherwise.
WarpedModel build_model(ModelKind kind, int n, double r_max, double parameter = 1.0,
                        const std::optional<ProfileTable>& table = std::nullopt,
                        int certificate_nodes = WarpedModel::default_certificate_nodes);

// omega_{n-1} int_0^r phi^{n-1} ds by composite Simpson.
double ball_volume(const WarpedModel& model, double r);

struct BishopGromovSeries {
  std::vector<double> r;
  std::vector<double> ratio;         // V(r) / (omega_n r^n)
  std::vector<double> sector_ratio;  // phi(r)^{n-1} / r^{n-1}
  double max_forward_difference = 0.0;
  double max_sector_forward_difference = 0.0;
  bool hypothesis_met = false;  // Ricci certificate >= 0

  bool non_increasing(double tol) const {
    return max_forward_difference <= tol && max_sector_forward_difference <= tol;
  }
};

BishopGromovSeries bishop_gromov_ratio(const WarpedModel& model, std::span<const double> r_grid);

// S^1(circumference) x R^{flat_dim}. Ricci-flat.
struct FlatCylinder {
  double circumference = 1.0;
  int flat_dim = 2;

  int dimension() const { return flat_dim + 1; }
};

struct CylinderPoint {
  double angle = 0.0;
  std::vector<double> flat;
};

// Minimum over winding images of the universal-cover distance.
double cylinder_distance(const FlatCylinder& cyl, const CylinderPoint& a, const CylinderPoint& b);

// Exact volume of the metric ball of radius r about any point, from the
// fundamental-domain integral over the circle coordinate.
double cylinder_ball_volume(const FlatCylinder& cyl, double r);

}  // namespace hlab
