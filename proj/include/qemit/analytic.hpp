#pragma once

#include <Eigen/Dense>

#include "qemit/emitter.hpp"

namespace qemit {

// Closed-form common-mode g2(tau) for N equal-brightness emitters:
//   g2(tau) = 1 - (G_inc(tau) - Re G_coh(tau)) / N^2
// with G_inc the per-emitter population decay sum and G_coh the pairwise
// coherence sum decaying at Gamma_kj and beating at Delta_kj.
struct AnalyticG2Params {
  Eigen::VectorXd gamma_tot;  // gamma_k + gamma_k^p, ns^-1
  Eigen::MatrixXd big_gamma;  // Gamma_kj, ns^-1
  Eigen::MatrixXd delta;      // Delta_kj = omega_k - omega_j, rad/ns

  int size() const { return static_cast<int>(gamma_tot.size()); }
  void validate() const;

  static AnalyticG2Params from_emitters(const std::vector<EmitterParams>& emitters);

  // Uniform ensemble: all emitters share gamma_tot and gamma_d; deltas gives
  // each emitter's frequency offset (empty: all zero).
  static AnalyticG2Params uniform(int n, double gamma_tot, double gamma_d,
                                  const std::vector<double>& omegas = {});
};

// Evaluates the model on |tau| (the CW correlation is stationary and even).
// include_coherent=false drops G_coh, the fully distinguishable limit.
CorrelationTrace g2_analytic(const AnalyticG2Params& params,
                             const std::vector<double>& tau_grid,
                             bool include_coherent = true);

// Zero-delay baseline for N distinguishable sources: 1 - 1/N.
double distinguishable_baseline(int n);

// Zero-delay peak for N indistinguishable, zero-detuned sources: 2 - 2/N.
double ideal_bunching_peak(int n);

// Gaussian detector-response convolution on a uniform grid. Kernel is
// normalized to unit sum and truncated at +-5 sigma; the trace is extended
// by its edge values. fwhm = 0 returns the input unchanged.
CorrelationTrace convolve_irf(const CorrelationTrace& trace, double fwhm);

}  // namespace qemit
