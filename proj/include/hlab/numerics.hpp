#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hlab {

// Raised when a computation cannot deliver a trustworthy number (mass drift,
// positivity loss, non-convergence). Maps to CLI exit code 2.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Area of the unit k-sphere in R^{k+1}: |S^0| = 2, |S^1| = 2 pi,
// |S^k| = 2 pi / (k - 1) |S^{k-2}|.
double unit_sphere_area(int k);

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

// Composite Simpson on a uniform grid. An odd interval count closes with
// the 3/8 rule on the last three intervals.
double simpson(std::span<const double> f, double h);

// Composite trapezoid on a uniform grid.
double trapezoid(std::span<const double> f, double h);

// Simpson on [a, b] with `intervals` (rounded up to even) subintervals.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int intervals);

// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
// `upper[n-1]` are ignored. Throws NumericalFailure on a zero pivot.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

// Bisection for a sign change of f on [a, b]; returns the root to `tol`.
double bisect(const std::function<double(double)>& f, double a, double b,
              double tol = 1e-13, int max_iter = 200);

// Cubic spline on strictly increasing knots. The left end is clamped to
// `left_slope`; the right end is clamped to a one-sided cubic estimate.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y, double left_slope);

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }

 private:
  std::size_t segment(double t) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

// 64-bit FNV-1a, used for config fingerprints in report headers.
std::uint64_t fnv1a(std::string_view text);

}  // namespace hlab
