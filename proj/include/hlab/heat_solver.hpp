#pragma once

#include <iosfwd>
#include <limits>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hlab/model_manifolds.hpp"

namespace hlab {

// Uniform radial nodes r_i = i h on [0, r_max] and the time stepping rule
// dtau(tau) = clamp(dtau_rel * tau, dtau_min, dtau_max).
struct RadialGrid {
  int intervals = 1000;
  double r_max = 1.0;
  double tau0 = 0.01;
  double tau_end = 1.0;
  double dtau_rel = 0.01;
  double dtau_min = 1e-6;
  double dtau_max = 0.01;

  double h() const { return r_max / intervals; }
  double r(int i) const { return r_max * i / intervals; }
  double step_at(double tau) const;
  void validate() const;
};

// Smallest r_max for which the flat Gaussian tail mass beyond r_max stays
// below `tail` up to tau_end.
double boundary_radius(int n, double tau_end, double tail = 1e-10);

enum class Provenance { seeded_delta, initial_data };

struct HeatField {
  int dimension = 0;
  double h = 0.0;
  Provenance provenance = Provenance::initial_data;
  std::vector<double> r;
  std::vector<double> cell_volume;  // conservative quadrature weights
  std::vector<double> taus;         // snapshot times
  std::vector<std::vector<double>> u;
  std::vector<double> mass;         // sum_i cell_volume_i u_i at each snapshot
  double seed_mass_deficit = 0.0;   // 1 - raw Gaussian seed mass (seeded fields)
  long steps = 0;

  std::span<const double> at(std::size_t snapshot) const { return u.at(snapshot); }
  double max_mass_drift() const;
};

struct HeatSolveOptions {
  double mass_tolerance = 1e-6;      // relative
  double negativity_abort = 1e-12;   // relative to max |u|
};

// Crank-Nicolson in conservative finite-volume form
//   V_i du_i/dtau = A_{i+1/2}(u_{i+1} - u_i) - A_{i-1/2}(u_i - u_{i-1}),
// A_{i+1/2} = omega_{n-1} phi(r_{i+1/2})^{n-1} / h, zero flux at r_max. At the
// pole this is the regularity limit u_tau = n u_rr.
HeatField solve_radial_heat(const WarpedModel& model, const RadialGrid& grid,
                            std::span<const double> initial, std::span<const double> output_taus,
                            const HeatSolveOptions& options = {});

// Seeds the flat Gaussian (4 pi tau0)^{-n/2} exp(-r^2 / 4 tau0), renormalised
// to unit mass, and evolves it. Throws if the raw seed mass deficit exceeds
// `seed_tolerance`.
HeatField fundamental_solution(const WarpedModel& model, const RadialGrid& grid,
                               std::span<const double> output_taus, double seed_tolerance = 1e-2,
                               const HeatSolveOptions& options = {});

// (4 fine - coarse) / 3 on the coarse nodes; `fine` must have twice the
// intervals on the same radius and the same snapshot times.
HeatField richardson_combine(const HeatField& coarse, const HeatField& fine);

// A closed-form kernel sampled on a radial grid, with the cell volumes of `model`.
HeatField tabulate_kernel(const WarpedModel& model, const RadialGrid& grid, std::span<const double> taus,
                          const std::function<double(double r, double tau)>& kernel);

// Closed-form kernels from the pole, used as oracles.
double flat_heat_kernel(int n, double r, double tau);
// Round S^3 of radius 1, exact: image sum over the closed geodesics.
double sphere3_heat_kernel(double r, double tau, int images = 8);
// Leading (k = 0) term of the S^3 image sum.
double sphere3_heat_kernel_leading(double r, double tau);
// Hyperbolic H^3 of curvature -1, exact.
double hyperbolic3_heat_kernel(double r, double tau);

struct EntropyReport {
  int dimension = 0;
  bool hypothesis_met = false;    // Ricci certificate >= 0
  bool fundamental_input = false; // provenance == seeded_delta
  std::vector<double> taus;
  std::vector<double> W;
  std::vector<double> N;
  std::vector<double> W_trapezoid;
  std::vector<double> N_trapezoid;
  std::vector<double> mass_residual;  // |int u dmu - 1| by Simpson
  std::vector<double> dW;             // forward differences
  std::vector<double> dN;

  double max_forward_W() const;
  double max_forward_N() const;
  double max_quadrature_gap() const;
};

struct EntropyOptions {
  double positivity_floor = 1e-300;
  double normalization_tolerance = 1e-4;
};

// W = int (tau |grad f|^2 + f - n) u dmu with f = -log u - (n/2) log(4 pi tau),
// and the Nash entropy N = int f u dmu - n/2. Both by Simpson, re-integrated
// by the trapezoid rule for a cross-check.
EntropyReport entropy_report(const WarpedModel& model, const HeatField& field,
                             const EntropyOptions& options = {});
EntropyReport w_entropy(const WarpedModel& model, const HeatField& field,
                        const EntropyOptions& options = {});
EntropyReport nash_entropy(const WarpedModel& model, const HeatField& field,
                           const EntropyOptions& options = {});

struct AvrLink {
  bool compact = false;       // both limits are -inf
  double w_limit = 0.0;       // W at the largest reliable tau
  double log_volume_ratio = 0.0;  // log V(r)/(omega_n r^n) at the largest r
  double tau = 0.0;
  double r = 0.0;
  double gap() const { return std::abs(w_limit - log_volume_ratio); }
};

struct AvrOptions {
  double tau = 25.0;
  double tau0 = 0.01;
  double h = 0.02;
};

AvrLink avr_link_check(const WarpedModel& model, const AvrOptions& options = {});

void write_heat_field_csv(std::ostream& out, const HeatField& field);
void write_entropy_csv(std::ostream& out, const EntropyReport& report);

}  // namespace hlab
