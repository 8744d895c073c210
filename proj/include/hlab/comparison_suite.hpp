#pragma once

#include <span>
#include <string>
#include <vector>

#include "hlab/heat_solver.hpp"
#include "hlab/inequality_report.hpp"
#include "hlab/l_geodesics.hpp"
#include "hlab/model_manifolds.hpp"

namespace hlab {

struct SampleWindow {
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
  double tau_min = 0.0;
  double tau_max = std::numeric_limits<double>::infinity();
  int stride = 1;  // every stride-th radial node
};

// margin = H_num - (4 pi tau)^{-n/2} exp(-r^2 / 4 tau) on the sampled nodes.
// With `equality` the margin is -|H_num - bound| instead.
InequalityReport cheeger_yau_check(const WarpedModel& model, const HeatField& field, double tolerance,
                                   const SampleWindow& window = {}, bool equality = false);

// Applies the centred-difference (d_tau - Delta) to the barrier
// (4 pi tau)^{-n/2} exp(-ell(y, tau)); margin = -residual.
InequalityReport subsolution_residual(const WarpedModel& model, std::span<const double> taus,
                                      std::span<const double> rs, double tolerance, double delta = 2e-4,
                                      bool equality = false);

struct CollapseRow {
  double circumference = 0.0;
  double kappa = 0.0;        // V(x0, r) / r^n
  double tau = 0.0;          // kappa^{1/n} r^2
  double reduced_volume = 0.0;
  double bound_basis = 0.0;  // sqrt(kappa) + exp(-1 / (8 kappa^{1/n}))
  double ratio = 0.0;        // reduced_volume / bound_basis
  bool uncollapsed = false;  // kappa within 10% of the Euclidean ball constant
};

struct CollapseTable {
  double r = 0.0;
  std::vector<CollapseRow> rows;
  double constant = 0.0;  // smallest C with V <= C * basis on every row
};

CollapseTable kappa_collapse_experiment(std::span<const double> circumferences, double r, int flat_dim = 2);

// Forward-difference scan: margin_j = -(v_{j+1} - v_j).
InequalityReport monotonicity_report(const std::string& name, std::span<const double> taus,
                                     std::span<const double> values, double tolerance, bool hypothesis_met);
InequalityReport monotonicity_report(const std::string& name, const ReducedVolumeSeries& series,
                                     double tolerance, bool hypothesis_met);
enum class EntropyQuantity { W, N };
InequalityReport monotonicity_report(const std::string& name, const EntropyReport& report,
                                     EntropyQuantity which, double tolerance);

}  // namespace hlab
