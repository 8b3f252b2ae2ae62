#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qemit/analytic.hpp"
#include "qemit/emitter.hpp"

namespace qemit {

// Raw coincidence counts vs delay, the measured object behind a g2 trace.
struct CoincidenceHistogram {
  std::vector<double> bin_centers;  // ns
  std::vector<double> counts;       // non-negative integers
  double bin_width = 0.0;           // ns
  std::string label;

  std::size_t size() const { return bin_centers.size(); }
  void validate() const;
};

// Divides by the mean count inside the baseline window; per-bin sigma is
// Poisson-propagated with the baseline uncertainty folded in quadrature.
CorrelationTrace normalize_histogram(const CoincidenceHistogram& hist, double window_lo,
                                     double window_hi);

// Dominant beat frequency (rad/ns) of a trace after removing its smooth
// envelope; nullopt when no significant oscillation is present.
std::optional<double> beat_frequency_estimate(const CorrelationTrace& trace);

// One dataset of a joint fit. The model is
//   a * convolve_irf(g2_analytic(...), irf_fwhm) + c
// with gamma_d shared across datasets, delta per-dataset (two-emitter fits),
// and gamma_tot fixed unless fit_gamma_tot is set (single-dot extraction).
struct FitDataset {
  CorrelationTrace data;
  int n_emitters = 2;
  double gamma_tot = 2.0;  // gamma + gamma_p, ns^-1 (fixed unless fit_gamma_tot)
  double irf_fwhm = 0.0;   // ns, fixed
  std::string label;

  // delta_init is also the fixed value when fit_delta is false (n = 2 only).
  bool fit_delta = false;
  double delta_init = 0.0, delta_lo = 0.0, delta_hi = 60.0;  // rad/ns

  bool fit_gamma_tot = false;
  double gamma_tot_lo = 0.1, gamma_tot_hi = 20.0;
};

struct JointFitOptions {
  double gamma_d_init = 2.0;
  double gamma_d_lo = 0.0;
  double gamma_d_hi = 20.0;
  bool fit_gamma_d = true;
  int multistarts = 16;
  int max_eval = 3000;
  unsigned seed = 1;          // bootstrap fallback
  bool init_delta_from_beat = true;
};

struct FittedParam {
  std::string name;
  double value = 0.0;
  double error = 0.0;
  bool at_bound = false;
};

struct FitResult {
  bool converged = false;
  double reduced_chi2 = 0.0;
  double chi2 = 0.0;
  int n_points = 0;
  int n_free = 0;
  FittedParam gamma_d;
  // per dataset: delta (if fitted), gamma_tot (if fitted), amplitude, offset
  std::vector<std::vector<FittedParam>> per_dataset;
  int evaluations = 0;
  bool errors_from_bootstrap = false;
  std::string message;
};

FitResult joint_fit(const std::vector<FitDataset>& datasets, const JointFitOptions& opts = {});

// Curvature-based standard errors: sqrt(diag((J^T J)^-1)) for prewhitened
// residuals. Exposed for the toy-model check.
Eigen::VectorXd curvature_errors(const Eigen::MatrixXd& jacobian);

}  // namespace qemit
