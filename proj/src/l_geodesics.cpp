#include "hlab/l_geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace hlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Velocity and covariant acceleration in the orthonormal polar frame,
// expressed as vectors of R^n (radial part along x/|x|).
struct FrameKinematics {
  Vec velocity;
  Vec acceleration;
};

FrameKinematics kinematics(const WarpedModel& model, const CurveJet& jet) {
  const std::size_t n = jet.x.size();
  const double r = norm(jet.x);
  if (r < 1e-14) return {jet.dx, jet.ddx};  // normal coordinates are geodesic at the pole
  Vec w(n), wp(n), wpp(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = jet.x[i] / r;
  const double rp = dot(w, jet.dx);
  for (std::size_t i = 0; i < n; ++i) wp[i] = (jet.dx[i] - rp * w[i]) / r;
  const double wp2 = dot(wp, wp);
  const double rpp = dot(w, jet.ddx) + r * wp2;
  for (std::size_t i = 0; i < n; ++i) wpp[i] = (jet.ddx[i] - rpp * w[i] - 2.0 * rp * wp[i]) / r;
  const double f = model.phi(r);
  const double fp = model.dphi(r);
  FrameKinematics k{Vec(n), Vec(n)};
  const double radial_acc = rpp - f * fp * wp2;
  for (std::size_t i = 0; i < n; ++i) {
    k.velocity[i] = rp * w[i] + f * wp[i];
    k.acceleration[i] = radial_acc * w[i] + f * (wpp[i] + wp2 * w[i]) + 2.0 * fp * rp * wp[i];
  }
  return k;
}

// Length^2 of the displacement d at midpoint m, metric frozen at m.
double metric_square(const WarpedModel& model, const Vec& m, const Vec& d) {
  const double r = norm(m);
  const double d2 = dot(d, d);
  if (r < 1e-14) return d2;
  const double radial = dot(d, m) / r;
  const double scale = model.phi(r) / r;
  return radial * radial + scale * scale * (d2 - radial * radial);
}

// Smallest unfolded arc at which radial geodesics stop minimising.
double cut_arc(const WarpedModel& model) {
  if (!model.compact()) return inf;
  const double limit = 2.0 * model.conjugate_radius();
  const auto excess = [&](double s) { return s - model.pole_distance(s) - 1e-12 * (1.0 + s); };
  const int steps = 4096;
  const double step = limit / steps;
  for (int k = 1; k <= steps; ++k) {
    const double s = k * step;
    if (excess(s) > 0.0) return bisect(excess, s - step, s, 1e-13);
  }
  return inf;
}

double sphere_cap_fraction(int n, double alpha) {
  if (alpha >= pi) return unit_sphere_area(n - 1);
  if (n == 2) return 2.0 * alpha;
  return unit_sphere_area(n - 2) *
         integrate([&](double t) { return std::pow(std::sin(t), n - 2); }, 0.0, alpha, 2000);
}

// Upper end of a radial integral on [a, limit) whose log-integrand is
// log_g: past the peak, where log_g has dropped 90 below its maximum.
double tail_cutoff(const std::function<double(double)>& log_g, double a, double limit, double step) {
  double best = -inf;
  double s = a;
  while (s < limit) {
    const double v = log_g(std::max(s, 1e-300));
    best = std::max(best, v);
    if (std::isfinite(best) && v < best - 90.0 && s > a + step) return s;
    s += step;
  }
  return limit;
}

}  // namespace

SigmaCurve jets_by_differences(std::function<Vec(double sigma)> position, double step) {
  return [position = std::move(position), step](double sigma) {
    CurveJet jet;
    jet.x = position(sigma);
    const std::size_t n = jet.x.size();
    jet.dx.assign(n, 0.0);
    jet.ddx.assign(n, 0.0);
    if (sigma - step < 0.0) {
      const Vec x1 = position(sigma + step);
      const Vec x2 = position(sigma + 2.0 * step);
      const Vec x3 = position(sigma + 3.0 * step);
      for (std::size_t i = 0; i < n; ++i) {
        jet.dx[i] = (-3.0 * jet.x[i] + 4.0 * x1[i] - x2[i]) / (2.0 * step);
        jet.ddx[i] = (2.0 * jet.x[i] - 5.0 * x1[i] + 4.0 * x2[i] - x3[i]) / (step * step);
      }
      return jet;
    }
    const Vec xp = position(sigma + step);
    const Vec xm = position(sigma - step);
    for (std::size_t i = 0; i < n; ++i) {
      jet.dx[i] = (xp[i] - xm[i]) / (2.0 * step);
      jet.ddx[i] = (xp[i] - 2.0 * jet.x[i] + xm[i]) / (step * step);
    }
    return jet;
  };
}

Vec LGeodesicPath::endpoint() const {
  Vec x(v.size(), 0.0);
  if (speed == 0.0) return x;
  const double s = speed * sigma_bar;
  const double r = radius.back();
  double sign = 1.0;
  // Past the antipode of a sphere the point lies on the opposite ray.
  if (r < s - 1e-12 * (1.0 + s) && std::isfinite(conjugate_sigma)) {
    const long folds = static_cast<long>(std::floor(s / (speed * conjugate_sigma)));
    if (folds % 2 == 1) sign = -1.0;
  }
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = sign * r * v[i] / speed;
  return x;
}

SigmaCurve LGeodesicPath::curve() const {
  return [v = v](double sigma) {
    CurveJet jet{Vec(v.size()), v, Vec(v.size(), 0.0)};
    for (std::size_t i = 0; i < v.size(); ++i) jet.x[i] = sigma * v[i];
    return jet;
  };
}

double l_length(const WarpedModel& model, std::span<const double> taus, std::span<const Vec> points) {
  if (taus.size() != points.size() || taus.size() < 2)
    throw std::invalid_argument("l_length: need matching tau and point samples (at least two)");
  if (std::abs(taus[0]) > 1e-15 || norm(points[0]) > 1e-12)
    throw std::invalid_argument("l_length: curve is not anchored at the pole at tau = 0");
  const std::size_t n = static_cast<std::size_t>(model.dimension());
  double energy = 0.0;
  for (std::size_t k = 1; k < taus.size(); ++k) {
    if (!(taus[k] > taus[k - 1])) throw std::invalid_argument("l_length: tau samples must increase");
    if (points[k].size() != n) throw std::invalid_argument("l_length: point dimension mismatch");
    const double ds = 2.0 * (std::sqrt(taus[k]) - std::sqrt(taus[k - 1]));
    Vec mid(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      mid[i] = 0.5 * (points[k][i] + points[k - 1][i]);
      d[i] = points[k][i] - points[k - 1][i];
    }
    energy += metric_square(model, mid, d) / ds;
  }
  return energy;
}

double l_length(const WarpedModel& model, const std::function<Vec(double tau)>& curve, double tau_bar,
                int segments) {
  if (!(tau_bar > 0.0)) throw std::invalid_argument("l_length: tau_bar must be positive");
  if (segments < 1) throw std::invalid_argument("l_length: need at least one segment");
  const double sigma_bar = 2.0 * std::sqrt(tau_bar);
  std::vector<double> taus(segments + 1);
  std::vector<Vec> points(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    const double s = sigma_bar * k / segments;
    taus[k] = k == segments ? tau_bar : 0.25 * s * s;
    points[k] = curve(taus[k]);
  }
  return l_length(model, taus, points);
}

double first_conjugate_arc(const WarpedModel& model) {
  double limit = inf;
  if (model.kind() == ModelKind::sphere) limit = 2.0 * pi * model.parameter();
  else if (model.kind() == ModelKind::custom) limit = model.r_max();
  else return inf;
  const int steps = 4096;
  const double step = limit / steps;
  for (int k = 1; k <= steps; ++k) {
    const double s = k * step;
    if (model.phi(s) <= 0.0) {
      return bisect([&](double t) { return model.phi(t); }, s - step, s, 1e-13);
    }
  }
  return inf;
}

double jacobian_at(const WarpedModel& model, double speed, double sigma) {
  const int n = model.dimension();
  if (speed == 0.0) return std::pow(sigma, n);
  return sigma * std::pow(model.phi(speed * sigma) / speed, n - 1);
}

JacobianTrack jacobian_along(const WarpedModel& model, double speed, double tau_bar, int samples) {
  if (!(tau_bar > 0.0) || speed < 0.0) throw std::invalid_argument("jacobian_along: need tau_bar > 0, |v| >= 0");
  const double sigma_bar = 2.0 * std::sqrt(tau_bar);
  if (speed * sigma_bar > model.chart_limit())
    throw std::out_of_range("jacobian_along: path leaves the chart");
  JacobianTrack t;
  t.conjugate_sigma = speed > 0.0 ? first_conjugate_arc(model) / speed : inf;
  for (int k = 0; k <= samples; ++k) {
    const double s = sigma_bar * k / samples;
    t.sigma.push_back(s);
    t.J.push_back(jacobian_at(model, speed, s));
  }
  return t;
}

LGeodesicPath l_exp(const WarpedModel& model, const Vec& v, double tau_bar, int samples) {
  if (static_cast<int>(v.size()) != model.dimension())
    throw std::invalid_argument("l_exp: velocity dimension differs from the model");
  if (!(tau_bar > 0.0)) throw std::invalid_argument("l_exp: tau_bar must be positive");
  if (samples < 2) throw std::invalid_argument("l_exp: need at least two samples");
  LGeodesicPath p;
  p.v = v;
  p.speed = norm(v);
  p.tau_bar = tau_bar;
  p.sigma_bar = 2.0 * std::sqrt(tau_bar);
  const double s_end = p.speed * p.sigma_bar;
  if (s_end > model.chart_limit()) throw std::out_of_range("l_exp: geodesic leaves the chart");
  for (int k = 0; k <= samples; ++k) {
    const double s = k == samples ? p.sigma_bar : p.sigma_bar * k / samples;
    p.sigma.push_back(s);
    p.tau.push_back(k == samples ? tau_bar : 0.25 * s * s);
    p.arc.push_back(p.speed * s);
    p.radius.push_back(model.pole_distance(p.speed * s));
    p.speed_tau.push_back(k == 0 ? (p.speed == 0.0 ? 0.0 : inf) : p.speed / std::sqrt(p.tau.back()));
    p.jacobian.push_back(jacobian_at(model, p.speed, s));
  }
  // sigma-energy of the constant-speed line.
  std::vector<double> energy(p.sigma.size(), p.speed * p.speed);
  p.L = simpson(energy, p.sigma_bar / samples);
  p.ell = p.L / p.sigma_bar;
  p.conjugate_sigma = p.speed > 0.0 ? first_conjugate_arc(model) / p.speed : inf;
  p.conjugate_before = p.conjugate_sigma <= p.sigma_bar * (1.0 + 1e-12);
  p.minimizing = s_end - model.pole_distance(s_end) <= 1e-12 * (1.0 + s_end);
  return p;
}

FirstVariation first_variation_residual(const WarpedModel& model, const SigmaCurve& curve,
                                        double sigma_bar, const TestField& field, int intervals) {
  if (!(sigma_bar > 0.0)) throw std::invalid_argument("first_variation_residual: sigma_bar must be positive");
  if (intervals < 2) throw std::invalid_argument("first_variation_residual: too few intervals");
  intervals += intervals % 2;
  const double h = sigma_bar / intervals;
  std::vector<double> integrand(intervals + 1);
  FirstVariation out;
  for (int k = 0; k <= intervals; ++k) {
    const double s = k == intervals ? sigma_bar : k * h;
    const CurveJet jet = curve(s);
    const Vec y = field(s);
    if (y.size() != jet.x.size())
      throw std::invalid_argument("first_variation_residual: test field dimension mismatch");
    const FrameKinematics kin = kinematics(model, jet);
    integrand[k] = dot(kin.acceleration, y);
    if (k == intervals) out.boundary = 2.0 * dot(kin.velocity, y);
  }
  out.interior = 2.0 * simpson(integrand, h);
  out.pairing = out.boundary - out.interior;
  return out;
}

FirstVariation first_variation_residual(const WarpedModel& model, const LGeodesicPath& path,
                                        const TestField& field, int intervals) {
  if (path.speed * path.sigma_bar > model.conjugate_radius())
    throw std::invalid_argument("first_variation_residual: path runs past the antipode");
  return first_variation_residual(model, path.curve(), path.sigma_bar, field, intervals);
}

MinimalitySets minimality_sets(const WarpedModel& model, double sigma_bar, std::span<const Vec> directions) {
  if (!(sigma_bar > 0.0)) throw std::invalid_argument("minimality_sets: sigma_bar must be positive");
  const double conj = first_conjugate_arc(model);
  double cut = cut_arc(model);
  bool limited = false;
  if (!std::isfinite(cut)) {
    cut = model.chart_limit();
    limited = true;
  }
  MinimalitySets sets;
  sets.sigma_bar = sigma_bar;
  for (const Vec& d : directions) {
    if (static_cast<int>(d.size()) != model.dimension())
      throw std::invalid_argument("minimality_sets: direction dimension mismatch");
    DirectionThreshold t;
    t.direction = d;
    t.d_max = std::isfinite(conj) ? conj / sigma_bar : model.chart_limit() / sigma_bar;
    t.c_max = std::min(cut, std::isfinite(conj) ? conj : inf) / sigma_bar;
    t.chart_limited = limited;
    sets.entries.push_back(t);
  }
  return sets;
}

MinimalitySets minimality_sets(const FlatCylinder& cyl, double sigma_bar, std::span<const Vec> directions) {
  if (!(sigma_bar > 0.0)) throw std::invalid_argument("minimality_sets: sigma_bar must be positive");
  MinimalitySets sets;
  sets.sigma_bar = sigma_bar;
  const CylinderPoint base{0.0, Vec(cyl.flat_dim, 0.0)};
  for (const Vec& d : directions) {
    if (static_cast<int>(d.size()) != cyl.dimension())
      throw std::invalid_argument("minimality_sets: direction dimension mismatch");
    const double len = norm(d);
    if (!(len > 0.0)) throw std::invalid_argument("minimality_sets: zero direction");
    DirectionThreshold t;
    t.direction = d;
    t.d_max = inf;  // flat: no conjugate points
    const double u0 = d[0] / len;
    if (std::abs(u0) < 1e-15) {
      t.c_max = inf;
      t.chart_limited = true;
      sets.entries.push_back(t);
      continue;
    }
    const auto endpoint = [&](double s) {
      CylinderPoint p{2.0 * pi * s * u0 / cyl.circumference, Vec(cyl.flat_dim)};
      for (int i = 0; i < cyl.flat_dim; ++i) p.flat[i] = s * d[i + 1] / len;
      return p;
    };
    const auto excess = [&](double s) {
      return s - cylinder_distance(cyl, base, endpoint(s)) - 1e-12 * (1.0 + s);
    };
    const double limit = 2.0 * cyl.circumference / std::abs(u0);
    const int steps = 1024;
    const double step = limit / steps;
    double arc = inf;
    for (int k = 1; k <= steps; ++k) {
      if (excess(k * step) > 0.0) {
        arc = bisect(excess, (k - 1) * step, k * step, 1e-13);
        break;
      }
    }
    t.c_max = arc / sigma_bar;
    sets.entries.push_back(t);
  }
  return sets;
}

ReducedDistance reduced_distance(const WarpedModel& model, double r, double tau_bar) {
  if (!(tau_bar > 0.0)) throw std::invalid_argument("reduced_distance: tau_bar must be positive");
  double reach = std::min(cut_arc(model), model.chart_limit());
  if (model.compact()) reach = std::min(reach, model.r_max());
  if (!(r >= 0.0) || r > reach * (1.0 + 1e-14))
    throw std::out_of_range("reduced_distance: endpoint outside the reachable region");
  const double sigma_bar = 2.0 * std::sqrt(tau_bar);
  // Shoot on the arc s = |v| sigma_bar: pole_distance(s) = r.
  ReducedDistance out;
  double s = r;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    ++out.iterations;
    const double f = model.pole_distance(s) - r;
    if (std::abs(f) <= 1e-15 * (1.0 + r)) {
      converged = true;
      break;
    }
    s -= f;  // d pole_distance / ds = 1 before the cut
    if (s < 0.0 || s > reach) break;
  }
  if (!converged) {
    s = bisect([&](double t) { return model.pole_distance(t) - r; }, 0.0, reach, 1e-14);
    out.iterations += 1;
  }
  out.speed = s / sigma_bar;
  Vec v(model.dimension(), 0.0);
  v[0] = out.speed;
  const LGeodesicPath path = l_exp(model, v, tau_bar, 64);
  std::vector<Vec> points;
  for (std::size_t k = 0; k < path.sigma.size(); ++k) {
    Vec x(v.size(), 0.0);
    x[0] = path.radius[k];
    points.push_back(x);
  }
  out.ell = l_length(model, path.tau, points) / sigma_bar;
  out.ell_formula = r * r / (4.0 * tau_bar);
  return out;
}

ReducedDistance reduced_distance(const FlatCylinder& cyl, const CylinderPoint& y, double tau_bar) {
  if (!(tau_bar > 0.0)) throw std::invalid_argument("reduced_distance: tau_bar must be positive");
  if (static_cast<int>(y.flat.size()) != cyl.flat_dim)
    throw std::invalid_argument("reduced_distance: flat dimension mismatch");
  const double sigma_bar = 2.0 * std::sqrt(tau_bar);
  const double eps = cyl.circumference;
  const double dx = eps * y.angle / (2.0 * pi);
  double flat2 = 0.0;
  for (double c : y.flat) flat2 += c * c;
  const long k0 = std::lround(-dx / eps);
  ReducedDistance out;
  double best = inf;
  // Each winding image is the endpoint of one straight L-geodesic.
  for (long k = k0 - 2; k <= k0 + 2; ++k) {
    ++out.iterations;
    const double disp = dx + static_cast<double>(k) * eps;
    const double speed2 = (disp * disp + flat2) / (sigma_bar * sigma_bar);
    const double L = speed2 * sigma_bar;
    if (L / sigma_bar < best) {
      best = L / sigma_bar;
      out.speed = std::sqrt(speed2);
    }
  }
  out.ell = best;
  const double d = cylinder_distance(cyl, CylinderPoint{0.0, Vec(cyl.flat_dim, 0.0)}, y);
  out.ell_formula = d * d / (4.0 * tau_bar);
  return out;
}

double ricci_integral(const WarpedModel& model, double speed, double tau_bar) {
  const double sigma_bar = 2.0 * std::sqrt(tau_bar);
  const auto integrand = [&](double s) {
    const double arc = speed * s;
    if (arc == 0.0) return 0.0;
    return 0.25 * s * s * speed * speed * model.curvature(model.pole_distance(arc)).ric_radial;
  };
  return integrate(integrand, 0.0, sigma_bar, 400);
}

std::vector<IdentityResidual> identity_residuals(const WarpedModel& model, std::span<const double> rs,
                                                 double tau_bar, double delta) {
  const int n = model.dimension();
  double cut = std::min(cut_arc(model), first_conjugate_arc(model));
  cut = std::min(cut, model.chart_limit());
  const auto ell = [&](double r, double t) { return reduced_distance(model, r, t).ell; };
  std::vector<IdentityResidual> out;
  for (double r : rs) {
    if (!(r > delta) || r + delta >= cut)
      throw std::out_of_range("identity_residuals: stencil leaves the smooth region of ell at r = " +
                              std::to_string(r));
    const double dt = 0.1 * delta * tau_bar;
    const double l0 = ell(r, tau_bar);
    const double lp = ell(r + delta, tau_bar);
    const double lm = ell(r - delta, tau_bar);
    const double lr = (lp - lm) / (2.0 * delta);
    const double lrr = (lp - 2.0 * l0 + lm) / (delta * delta);
    const double lt = (ell(r, tau_bar + dt) - ell(r, tau_bar - dt)) / (2.0 * dt);
    IdentityResidual res;
    res.r = r;
    res.gradient = std::abs(tau_bar * lr * lr - l0);
    res.gradient_ratio = tau_bar * lr * lr / l0;
    res.time = std::abs(tau_bar * lt + l0);
    res.time_ratio = tau_bar * lt / l0;
    res.laplacian = lrr + (n - 1) * model.dphi(r) / model.phi(r) * lr;
    const double speed = r / (2.0 * std::sqrt(tau_bar));
    const double I = ricci_integral(model, speed, tau_bar);
    res.slack = n / (2.0 * tau_bar) - I / std::pow(tau_bar, 1.5) - res.laplacian;
    res.slack_alt = n / (2.0 * tau_bar) - I / tau_bar - res.laplacian;
    out.push_back(res);
  }
  return out;
}

IntegrandCheck integrand_derivative_check(const WarpedModel& model, double speed,
                                          std::span<const double> taus, double tolerance,
                                          double delta) {
  if (taus.empty()) throw std::invalid_argument("integrand_derivative_check: empty tau grid");
  const int n = model.dimension();
  const double conj = speed > 0.0 ? first_conjugate_arc(model) / speed : inf;
  IntegrandCheck out;
  const std::string res = "delta=" + std::to_string(delta);
  const bool hyp = model.ricci_certificate().nonnegative();
  for (InequalityReport* r : {&out.monotone, &out.log_jacobian, &out.log_jacobian_alt, &out.ell_constant}) {
    r->resolution = res;
    r->tolerance = tolerance;
    r->ricci_min = model.ricci_certificate().min();
    r->hypothesis_met = hyp;
  }
  out.monotone.check = "integrand_monotone";
  out.monotone.tag = "d/dtau of e^-ell (4 pi tau)^(-n/2) J is nonpositive along an L-geodesic";
  out.log_jacobian.check = "log_jacobian_bound";
  out.log_jacobian.tag = "d log J/dtau <= n/(2 tau) - tau^(-3/2) int tau^(3/2) Ric(X,X)";
  out.log_jacobian_alt.check = "log_jacobian_bound_alt";
  out.log_jacobian_alt.tag = "d log J/dtau <= n/(2 tau) - tau^(-1) int tau^(3/2) Ric(X,X)";
  out.ell_constant.check = "ell_constant_along_geodesic";
  out.ell_constant.tag = "d/dtau e^-ell = 0 along an L-geodesic";
  out.ell_constant.hypothesis_met = true;

  const auto ell_along = [&](double t) {
    const double s = speed * 2.0 * std::sqrt(t);
    return reduced_distance(model, model.pole_distance(s), t).ell;
  };
  const auto q = [&](double t) {
    return std::exp(-ell_along(t)) * std::pow(4.0 * pi * t, -0.5 * n) * jacobian_at(model, speed, 2.0 * std::sqrt(t));
  };
  for (double t : taus) {
    const double sigma = 2.0 * std::sqrt(t);
    if (!(t > 0.0)) throw std::invalid_argument("integrand_derivative_check: tau must be positive");
    if (sigma >= conj) throw std::invalid_argument("integrand_derivative_check: conjugate point inside the tau grid");
    if (sigma > 0.99 * conj) out.conjugate_near_boundary = true;
    const double dt = delta * t;
    double dq = 0.0;
    double dl = 0.0;
    if (2.0 * std::sqrt(t + dt) < conj) {
      dq = (q(t + dt) - q(t - dt)) / (2.0 * dt);
      dl = (ell_along(t + dt) - ell_along(t - dt)) / (2.0 * dt);
    } else {
      dq = (3.0 * q(t) - 4.0 * q(t - dt) + q(t - 2.0 * dt)) / (2.0 * dt);
      dl = (3.0 * ell_along(t) - 4.0 * ell_along(t - dt) + ell_along(t - 2.0 * dt)) / (2.0 * dt);
    }
    out.monotone.add(speed, t, -dq);
    out.ell_constant.add(speed, t, -std::abs(dl));
    const double s = speed * sigma;
    const double dlogJ =
        (1.0 / sigma + (speed > 0.0 ? (n - 1) * speed * model.dphi(s) / model.phi(s) : (n - 1) / sigma)) /
        std::sqrt(t);
    const double I = ricci_integral(model, speed, t);
    out.log_jacobian.add(speed, t, n / (2.0 * t) - I / std::pow(t, 1.5) - dlogJ);
    out.log_jacobian_alt.add(speed, t, n / (2.0 * t) - I / t - dlogJ);
  }
  for (InequalityReport* r : {&out.monotone, &out.log_jacobian, &out.log_jacobian_alt, &out.ell_constant})
    r->finalize();
  return out;
}

void SectorRegion::validate(int n) const {
  if (static_cast<int>(direction.size()) != n)
    throw std::invalid_argument("sector: direction dimension mismatch");
  if (!(norm(direction) > 0.0)) throw std::invalid_argument("sector: zero direction");
  if (!(half_angle > 0.0) || half_angle > pi) throw std::invalid_argument("sector: half-angle outside (0, pi]");
  if (!(v_min >= 0.0) || !(v_max > v_min)) throw std::invalid_argument("sector: need 0 <= v_min < v_max");
}

double cap_area(int n, double alpha) {
  if (n < 2) throw std::invalid_argument("cap_area: n >= 2");
  if (!(alpha > 0.0)) return 0.0;
  return sphere_cap_fraction(n, std::min(alpha, pi));
}

double ReducedVolumeSeries::max_forward_difference() const {
  double m = -inf;
  for (std::size_t j = 1; j < V_tangent.size(); ++j) m = std::max(m, V_tangent[j] - V_tangent[j - 1]);
  return m;
}

double ReducedVolumeSeries::max_gap() const {
  double m = 0.0;
  for (double g : gap)
    if (std::isfinite(g)) m = std::max(m, g);
  return m;
}

ReducedVolumeSeries reduced_volume(const WarpedModel& model, std::span<const double> taus,
                                   const std::optional<SectorRegion>& sector, int intervals) {
  const int n = model.dimension();
  if (sector) sector->validate(n);
  if (intervals < 2) throw std::invalid_argument("reduced_volume: too few intervals");
  intervals += intervals % 2;
  ReducedVolumeSeries out;
  out.sector = sector;
  out.method = sector ? "tangent-side pullback (sector)" : "tangent-side pullback + manifold-side";
  const double cap = sector ? cap_area(n, sector->half_angle) : unit_sphere_area(n - 1);
  const double a = sector ? sector->v_min : 0.0;
  const double b = sector ? sector->v_max : inf;
  const double cut = std::min({cut_arc(model), first_conjugate_arc(model), model.chart_limit()});
  const double omega = unit_sphere_area(n - 1);
  for (std::size_t j = 0; j < taus.size(); ++j) {
    const double t = taus[j];
    if (!(t > 0.0)) throw std::invalid_argument("reduced_volume: tau must be positive");
    if (j > 0 && !(t > taus[j - 1])) throw std::invalid_argument("reduced_volume: tau grid must increase");
    const double sigma = 2.0 * std::sqrt(t);
    const double pref = std::pow(4.0 * pi * t, -0.5 * n);
    double hi = std::min(b, cut / sigma);
    if (!(hi > a)) throw std::invalid_argument("reduced_volume: sector empty after truncation");
    if (!std::isfinite(hi)) {
      const auto log_g = [&](double s) { return -s * s + (n - 1) * std::log(model.phi(s * sigma)); };
      hi = tail_cutoff(log_g, a, model.chart_limit() / sigma, 0.05);
    }
    const auto tangent = [&](double s) {
      return std::exp(-s * s) * sigma * std::pow(model.phi(s * sigma), n - 1);
    };
    const double vt = cap * pref * integrate(tangent, a, hi, intervals);
    double vm = std::numeric_limits<double>::quiet_NaN();
    if (!sector) {
      double R = std::min(cut, model.compact() ? model.r_max() : inf);
      if (!std::isfinite(R)) {
        const auto log_m = [&](double r) { return -r * r / (4.0 * t) + (n - 1) * std::log(model.phi(r)); };
        R = tail_cutoff(log_m, 0.0, model.chart_limit(), 0.05 * sigma);
      }
      const auto manifold = [&](double r) {
        return pref * std::exp(-r * r / (4.0 * t)) * omega * std::pow(model.phi(r), n - 1);
      };
      vm = integrate(manifold, 0.0, R, intervals + 2);
    }
    out.taus.push_back(t);
    out.V_tangent.push_back(vt);
    out.V_manifold.push_back(vm);
    out.gap.push_back(std::isnan(vm) ? vm : std::abs(vt - vm));
  }
  return out;
}

ReducedVolumeSeries reduced_volume(const FlatCylinder& cyl, std::span<const double> taus, int intervals) {
  const int n = cyl.dimension();
  intervals += intervals % 2;
  ReducedVolumeSeries out;
  out.method = "fundamental domain";
  Vec along(n, 0.0);
  along[0] = 1.0;
  const CylinderPoint base{0.0, Vec(cyl.flat_dim, 0.0)};
  for (std::size_t j = 0; j < taus.size(); ++j) {
    const double t = taus[j];
    if (!(t > 0.0)) throw std::invalid_argument("reduced_volume: tau must be positive");
    if (j > 0 && !(t > taus[j - 1])) throw std::invalid_argument("reduced_volume: tau grid must increase");
    const double sigma = 2.0 * std::sqrt(t);
    // Minimising velocities form the slab |v_theta| <= c; the flat factors
    // integrate to pi^{(n-1)/2} exactly and J = sigma^n.
    const double c = minimality_sets(cyl, sigma, std::span<const Vec>(&along, 1)).entries[0].c_max;
    const double slab = integrate([](double x) { return std::exp(-x * x); }, -c, c, intervals);
    const double vt = std::pow(pi, -0.5 * n) * std::pow(pi, 0.5 * (n - 1)) * slab;
    const auto manifold = [&](double x) {
      const double d = cylinder_distance(cyl, base, CylinderPoint{2.0 * pi * x / cyl.circumference,
                                                                  Vec(cyl.flat_dim, 0.0)});
      return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * pi * t);
    };
    const double half = 0.5 * cyl.circumference;
    const double vm = integrate(manifold, -half, half, intervals);
    out.taus.push_back(t);
    out.V_tangent.push_back(vt);
    out.V_manifold.push_back(vm);
    out.gap.push_back(std::abs(vt - vm));
  }
  return out;
}

void write_reduced_volume_csv(std::ostream& out, const ReducedVolumeSeries& series) {
  out << "tau,V_tangent,V_manifold,gap\n";
  char buf[128];
  for (std::size_t j = 0; j < series.taus.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", series.taus[j], series.V_tangent[j],
                  series.V_manifold[j], series.gap[j]);
    out << buf;
  }
}

}  // namespace hlab
