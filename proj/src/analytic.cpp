#include "qemit/analytic.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qemit {

void AnalyticG2Params::validate() const {
  const int n = size();
  if (n < 1) throw std::invalid_argument("AnalyticG2Params: empty");
  if (big_gamma.rows() != n || big_gamma.cols() != n || delta.rows() != n || delta.cols() != n)
    throw std::invalid_argument("AnalyticG2Params: matrix shape mismatch");
  for (int k = 0; k < n; ++k) {
    if (!(gamma_tot(k) > 0.0)) throw std::invalid_argument("AnalyticG2Params: gamma_tot <= 0");
    if (std::abs(delta(k, k)) > 0.0)
      throw std::invalid_argument("AnalyticG2Params: nonzero diagonal detuning");
    for (int j = 0; j < n; ++j)
      if (std::abs(delta(k, j) + delta(j, k)) > 1e-12)
        throw std::invalid_argument("AnalyticG2Params: detuning not antisymmetric");
  }
}

AnalyticG2Params AnalyticG2Params::from_emitters(const std::vector<EmitterParams>& emitters) {
  const int n = static_cast<int>(emitters.size());
  AnalyticG2Params p;
  p.gamma_tot.resize(n);
  p.big_gamma.resize(n, n);
  p.delta.resize(n, n);
  for (int k = 0; k < n; ++k) {
    const auto& ek = emitters[static_cast<std::size_t>(k)];
    ek.validate();
    p.gamma_tot(k) = ek.gamma + ek.gamma_p;
    for (int j = 0; j < n; ++j) {
      const auto& ej = emitters[static_cast<std::size_t>(j)];
      p.big_gamma(k, j) =
          0.5 * (ek.gamma + ej.gamma + ek.gamma_p + ej.gamma_p + ek.gamma_d + ej.gamma_d);
      p.delta(k, j) = ek.omega - ej.omega;
    }
  }
  return p;
}

AnalyticG2Params AnalyticG2Params::uniform(int n, double gamma_tot, double gamma_d,
                                           const std::vector<double>& omegas) {
  std::vector<EmitterParams> ems(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    auto& em = ems[static_cast<std::size_t>(k)];
    em.gamma = gamma_tot;  // only the sum gamma + gamma_p enters the model
    em.gamma_p = 0.0;
    em.gamma_d = gamma_d;
    em.omega = omegas.empty() ? 0.0 : omegas.at(static_cast<std::size_t>(k));
  }
  return from_emitters(ems);
}

CorrelationTrace g2_analytic(const AnalyticG2Params& params,
                             const std::vector<double>& tau_grid, bool include_coherent) {
  params.validate();
  const int n = params.size();
  const double n2 = static_cast<double>(n) * n;

  CorrelationTrace trace;
  trace.tau = tau_grid;
  trace.g2.reserve(tau_grid.size());
  for (double tau_signed : tau_grid) {
    const double tau = std::abs(tau_signed);
    double g_inc = 0.0;
    for (int k = 0; k < n; ++k) g_inc += std::exp(-params.gamma_tot(k) * tau);
    std::complex<double> g_coh = 0.0;
    if (include_coherent) {
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          if (j == k) continue;
          g_coh += std::exp(std::complex<double>(-params.big_gamma(k, j) * tau,
                                                 -params.delta(k, j) * tau));
        }
    }
    trace.g2.push_back(1.0 - (g_inc - g_coh.real()) / n2);
  }
  return trace;
}

double distinguishable_baseline(int n) {
  if (n < 1) throw std::invalid_argument("distinguishable_baseline: n >= 1 required");
  // (n - 1) / n rather than 1 - 1/n: the former is exactly 2/3, 0.75, ...
  return static_cast<double>(n - 1) / static_cast<double>(n);
}

double ideal_bunching_peak(int n) {
  if (n < 1) throw std::invalid_argument("ideal_bunching_peak: n >= 1 required");
  return 2.0 * static_cast<double>(n - 1) / static_cast<double>(n);
}

CorrelationTrace convolve_irf(const CorrelationTrace& trace, double fwhm) {
  trace.validate();
  if (fwhm < 0.0) throw std::invalid_argument("convolve_irf: fwhm must be >= 0");
  if (fwhm == 0.0) return trace;
  if (trace.size() < 2) throw std::invalid_argument("convolve_irf: trace too short");

  const double dt = trace.tau[1] - trace.tau[0];
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (std::abs((trace.tau[i] - trace.tau[i - 1]) - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("convolve_irf: grid must be uniform");
  if (dt > fwhm / 10.0)
    throw std::invalid_argument("convolve_irf: grid too coarse for IRF (need spacing <= fwhm/10)");

  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const int half = static_cast<int>(std::ceil(5.0 * sigma / dt));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int m = -half; m <= half; ++m) {
    const double x = m * dt / sigma;
    const double w = std::exp(-0.5 * x * x);
    kernel[static_cast<std::size_t>(m + half)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  const int npt = static_cast<int>(trace.size());
  CorrelationTrace out;
  out.tau = trace.tau;
  out.g2.resize(trace.size());
  for (int i = 0; i < npt; ++i) {
    double acc = 0.0;
    for (int m = -half; m <= half; ++m) {
      int idx = i + m;
      idx = std::max(0, std::min(npt - 1, idx));  // edge-value extension
      acc += kernel[static_cast<std::size_t>(m + half)] * trace.g2[static_cast<std::size_t>(idx)];
    }
    out.g2[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace qemit
