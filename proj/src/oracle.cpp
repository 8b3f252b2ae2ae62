#include "qemit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qemit {

Matrix collective_lowering(const std::vector<std::complex<double>>& weights, int n_emitters) {
  const int dim = 1 << n_emitters;
  Matrix s = Matrix::Zero(dim, dim);
  for (int k = 0; k < n_emitters; ++k) {
    const int b = 1 << k;
    for (int i = 0; i < dim; ++i) {
      if (i & b) continue;
      s(i, i | b) += weights[static_cast<std::size_t>(k)];
    }
  }
  return s;
}

double steady_intensity(const ProductLindbladian& gen,
                        const std::vector<std::complex<double>>& weights) {
  const Matrix s = collective_lowering(weights, gen.num_emitters());
  const Matrix rho = gen.steady_state().rho;
  return (s.adjoint() * s * rho).trace().real();
}

namespace {

// Evaluates tr[readout * e^{L tau}(collapsed)] along an increasing tau grid.
std::vector<double> regression_trace(const ProductLindbladian& gen, Matrix collapsed,
                                     const Matrix& readout, const std::vector<double>& taus,
                                     const EvolveOptions& opts) {
  std::vector<double> out;
  out.reserve(taus.size());
  double t_prev = 0.0;
  for (double tau : taus) {
    if (tau < t_prev) throw std::invalid_argument("regression_trace: tau grid must increase");
    collapsed = evolve(gen, std::move(collapsed), tau - t_prev, opts);
    t_prev = tau;
    out.push_back((readout * collapsed).trace().real());
  }
  return out;
}

}  // namespace

CorrelationTrace g2_oracle(const EnsembleConfig& ensemble, const std::vector<double>& tau_grid,
                           const EvolveOptions& opts) {
  ensemble.validate();
  for (double tau : tau_grid)
    if (tau < 0.0) throw std::invalid_argument("g2_oracle: tau grid must be non-negative");

  ProductLindbladian gen(ensemble.emitters);
  const Matrix s = collective_lowering(ensemble.weights, gen.num_emitters());
  const Matrix n_c = s.adjoint() * s;
  const Matrix rho_ss = gen.steady_state().rho;
  const double i0 = (n_c * rho_ss).trace().real();
  if (i0 <= 1e-300) throw std::runtime_error("g2_oracle: zero steady-state intensity");

  Matrix collapsed = s * rho_ss * s.adjoint();
  CorrelationTrace trace;
  trace.tau = tau_grid;
  trace.g2 = regression_trace(gen, std::move(collapsed), n_c, tau_grid, opts);
  for (double& v : trace.g2) v /= i0 * i0;
  return trace;
}

CorrelationTrace cross_correlation_oracle(const std::vector<EmitterParams>& emitters,
                                          const std::vector<std::complex<double>>& weights_b1,
                                          const std::vector<std::complex<double>>& weights_b2,
                                          const std::vector<double>& tau_grid,
                                          const EvolveOptions& opts) {
  if (weights_b1.size() != emitters.size() || weights_b2.size() != emitters.size())
    throw std::invalid_argument("cross_correlation_oracle: weight vector length mismatch");

  ProductLindbladian gen(emitters);
  const Matrix s1 = collective_lowering(weights_b1, gen.num_emitters());
  const Matrix s2 = collective_lowering(weights_b2, gen.num_emitters());
  const Matrix n1 = s1.adjoint() * s1;
  const Matrix n2 = s2.adjoint() * s2;
  const Matrix rho_ss = gen.steady_state().rho;
  const double i1 = (n1 * rho_ss).trace().real();
  const double i2 = (n2 * rho_ss).trace().real();
  if (i1 <= 1e-300) throw std::runtime_error("cross_correlation_oracle: zero intensity, port 1");
  if (i2 <= 1e-300) throw std::runtime_error("cross_correlation_oracle: zero intensity, port 2");

  // Split the grid at zero; negative delays swap which port clicks first.
  std::vector<double> pos, negmag;
  for (double tau : tau_grid) (tau >= 0.0 ? pos : negmag).push_back(std::abs(tau));
  std::sort(negmag.begin(), negmag.end());

  std::vector<double> vals_pos =
      regression_trace(gen, s1 * rho_ss * s1.adjoint(), n2, pos, opts);
  std::vector<double> vals_neg =
      regression_trace(gen, s2 * rho_ss * s2.adjoint(), n1, negmag, opts);

  CorrelationTrace trace;
  trace.tau = tau_grid;
  trace.g2.resize(tau_grid.size());
  std::size_t ip = 0;
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (tau_grid[i] >= 0.0) {
      trace.g2[i] = vals_pos[ip++] / (i1 * i2);
    }
  }
  // negmag was sorted ascending; negative taus appear in descending magnitude.
  std::size_t in = negmag.size();
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (tau_grid[i] < 0.0) trace.g2[i] = vals_neg[--in] / (i1 * i2);
  }
  return trace;
}

}  // namespace qemit
