#include "hlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace hlab {

double unit_sphere_area(int k) {
  if (k < 0) throw std::invalid_argument("unit_sphere_area: negative dimension");
  double area = (k % 2 == 0) ? 2.0 : 2.0 * pi;
  for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) area *= 2.0 * pi / (j - 1);
  return area;
}

double unit_ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
  return unit_sphere_area(n - 1) / n;
}

double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  if (n == 4) return 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
  const std::size_t intervals = n - 1;
  std::size_t end = intervals % 2 == 0 ? n - 1 : n - 4;
  double acc = f[0] + f[end];
  for (std::size_t i = 1; i < end; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  double total = acc * h / 3.0;
  if (end != n - 1)
    total += 3.0 * h / 8.0 * (f[end] + 3.0 * f[end + 1] + 3.0 * f[end + 2] + f[end + 3]);
  return total;
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double acc = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) acc += f[i];
  return acc * h;
}

double integrate(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2 == 1) ++intervals;
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double pivot = diag[0];
  if (pivot == 0.0) throw NumericalFailure("tridiagonal solve: zero pivot");
  c[0] = n > 1 ? upper[0] / pivot : 0.0;
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - lower[i] * c[i - 1];
    if (pivot == 0.0) throw NumericalFailure("tridiagonal solve: zero pivot");
    c[i] = i + 1 < n ? upper[i] / pivot : 0.0;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol,
              int max_iter) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericalFailure("bisect: no sign change on bracket");
  for (int it = 0; it < max_iter && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y, double left_slope)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 4 || y_.size() != n)
    throw std::invalid_argument("CubicSpline: need at least four (x, y) pairs");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("CubicSpline: knots must increase");

  // One-sided cubic slope at the right end from the last four knots.
  const auto lagrange_slope = [&](std::size_t k0) {
    double slope = 0.0;
    const double t = x_[n - 1];
    for (std::size_t j = k0; j < k0 + 4; ++j) {
      double dl = 0.0;
      for (std::size_t m = k0; m < k0 + 4; ++m) {
        if (m == j) continue;
        double term = 1.0 / (x_[j] - x_[m]);
        for (std::size_t q = k0; q < k0 + 4; ++q)
          if (q != j && q != m) term *= (t - x_[q]) / (x_[j] - x_[q]);
        dl += term;
      }
      slope += y_[j] * dl;
    }
    return slope;
  };
  const double right_slope = lagrange_slope(n - 4);

  std::vector<double> lo(n), di(n), up(n), rhs(n);
  const double h0 = x_[1] - x_[0];
  di[0] = h0 / 3.0;
  up[0] = h0 / 6.0;
  rhs[0] = (y_[1] - y_[0]) / h0 - left_slope;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1];
    const double hr = x_[i + 1] - x_[i];
    lo[i] = hl / 6.0;
    di[i] = (hl + hr) / 3.0;
    up[i] = hr / 6.0;
    rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
  }
  const double hn = x_[n - 1] - x_[n - 2];
  lo[n - 1] = hn / 6.0;
  di[n - 1] = hn / 3.0;
  rhs[n - 1] = right_slope - (y_[n - 1] - y_[n - 2]) / hn;
  solve_tridiagonal(lo, di, up, rhs);
  m_ = std::move(rhs);
}

std::size_t CubicSpline::segment(double t) const {
  if (t < x_.front() || t > x_.back())
    throw std::out_of_range("CubicSpline: evaluation outside the table");
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) i = 1;
  if (i >= x_.size()) i = x_.size() - 1;
  return i - 1;
}

double CubicSpline::value(double t) const {
  const std::size_t i = segment(t);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h;
  const double b = (t - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double t) const {
  const std::size_t i = segment(t);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h;
  const double b = (t - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

double CubicSpline::second_derivative(double t) const {
  const std::size_t i = segment(t);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h;
  const double b = (t - x_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace hlab
