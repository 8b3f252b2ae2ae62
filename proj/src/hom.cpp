#include "qemit/hom.hpp"

#include <cmath>
#include <stdexcept>

#include "qemit/oracle.hpp"

namespace qemit {

HomPairParams::HomPairParams() {
  const double s = 1.0 / std::sqrt(2.0);
  transfer << s, s, s, -s;
}

double HomPairParams::unitarity_deviation() const {
  const double eta = 0.5 * (transfer.col(0).squaredNorm() + transfer.col(1).squaredNorm());
  return (transfer.adjoint() * transfer - eta * Eigen::Matrix2cd::Identity()).norm() / eta;
}

void HomPairParams::validate() const {
  emitter_a.validate();
  emitter_b.validate();
  if (!(rep_period > 0.0)) throw std::invalid_argument("HomPairParams: rep_period <= 0");
  if (transfer.norm() == 0.0) throw std::invalid_argument("HomPairParams: zero transfer matrix");
}

namespace {

struct HomTerms {
  double g1, g2;            // radiative decay rates
  double gbar;              // amplitude decoherence (gamma1+gamma2)/2 + gd1 + gd2
  double delta;             // total detuning, rad/ns
  double c_fwd, c_rev;      // |T21 T12|^2 and |T11 T22|^2
  std::complex<double> chi;  // T11 T22 conj(T12 T21)
  double k;                 // gamma1 gamma2 / (gamma1 + gamma2)
  double p1, p2;            // singles per pulse at each detector
};

HomTerms make_terms(const HomPairParams& pair) {
  pair.validate();
  HomTerms t;
  t.g1 = pair.emitter_a.gamma;
  t.g2 = pair.emitter_b.gamma;
  t.gbar = 0.5 * (t.g1 + t.g2) + pair.emitter_a.gamma_d + pair.emitter_b.gamma_d;
  t.delta = pair.detuning + (pair.emitter_b.omega - pair.emitter_a.omega);
  const auto& m = pair.transfer;
  t.c_fwd = std::norm(m(1, 0) * m(0, 1));
  t.c_rev = std::norm(m(0, 0) * m(1, 1));
  t.chi = m(0, 0) * m(1, 1) * std::conj(m(0, 1) * m(1, 0));
  t.k = t.g1 * t.g2 / (t.g1 + t.g2);
  t.p1 = std::norm(m(0, 0)) + std::norm(m(0, 1));
  t.p2 = std::norm(m(1, 0)) + std::norm(m(1, 1));
  return t;
}

}  // namespace

CorrelationTrace hom_coincidence_density(const HomPairParams& pair,
                                         const std::vector<double>& tau_grid) {
  const HomTerms t = make_terms(pair);
  CorrelationTrace trace;
  trace.tau = tau_grid;
  trace.g2.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const double at = std::abs(tau);
    // The pairing of decay rate and routing coefficient swaps with the
    // detector click order (sign of tau); the interference term does not.
    double inc;
    if (tau >= 0.0)
      inc = t.c_fwd * std::exp(-t.g1 * at) + t.c_rev * std::exp(-t.g2 * at);
    else
      inc = t.c_rev * std::exp(-t.g1 * at) + t.c_fwd * std::exp(-t.g2 * at);
    const std::complex<double> osc =
        t.chi * std::exp(std::complex<double>(-t.gbar * at, t.delta * tau));
    const double density = t.k * (inc + 2.0 * osc.real()) / (t.p1 * t.p2);
    if (density < -1e-12)
      throw std::runtime_error("hom_coincidence_density: negative density, "
                               "transfer matrix violates the model assumptions");
    trace.g2.push_back(std::max(0.0, density));
  }
  return trace;
}

double hom_g2_zero(const HomPairParams& pair) {
  const HomTerms t = make_terms(pair);
  const double inc = t.c_fwd + t.c_rev;  // K (c_fwd + c_rev)(1/g1 + 1/g2) = c_fwd + c_rev
  const double coh =
      4.0 * t.k * t.chi.real() * t.gbar / (t.gbar * t.gbar + t.delta * t.delta);
  return (inc + coh) / (t.p1 * t.p2);
}

double hom_g2_zero_distinguishable(const HomPairParams& pair) {
  const HomTerms t = make_terms(pair);
  return (t.c_fwd + t.c_rev) / (t.p1 * t.p2);
}

double hom_visibility(double g2_ind, double g2_dis) {
  if (g2_dis <= 0.0) throw std::invalid_argument("hom_visibility: g2_dis must be > 0");
  return 1.0 - g2_ind / g2_dis;
}

HomResult hom_run(const HomPairParams& pair, const std::vector<double>& tau_grid) {
  HomResult result;
  result.density = hom_coincidence_density(pair, tau_grid);
  result.g2_zero = hom_g2_zero(pair);
  result.visibility = hom_visibility(result.g2_zero, hom_g2_zero_distinguishable(pair));
  return result;
}

double hom_g2_zero_cw_surrogate(const HomPairParams& pair, double pump_fraction, double t_max,
                                int n_tau) {
  pair.validate();
  std::vector<EmitterParams> ems{pair.emitter_a, pair.emitter_b};
  ems[0].gamma_p = pump_fraction * ems[0].gamma;
  ems[1].gamma_p = pump_fraction * ems[1].gamma;
  ems[1].omega += pair.detuning;
  // The master-equation dissipator at rate r decays optical coherences at
  // r/2, whereas this module's gamma_d is the amplitude-decay contribution
  // itself (gamma/2 + gamma_d); match the conventions before comparing.
  ems[0].gamma_d *= 2.0;
  ems[1].gamma_d *= 2.0;

  const auto& m = pair.transfer;
  const std::vector<std::complex<double>> port1{m(0, 0), m(0, 1)};
  const std::vector<std::complex<double>> port2{m(1, 0), m(1, 1)};
  const auto taus = linspace(0.0, t_max, static_cast<std::size_t>(n_tau));

  auto dip_area = [&](const std::vector<EmitterParams>& emitters) {
    const CorrelationTrace trace =
        cross_correlation_oracle(emitters, port1, port2, taus);
    double area = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i)
      area += 0.5 * (2.0 - trace.g2[i - 1] - trace.g2[i]) * (trace.tau[i] - trace.tau[i - 1]);
    return area;
  };

  const double d_actual = dip_area(ems);
  // Suppress the inter-emitter coherence with heavy extra dephasing; the
  // incoherent (which-path) dip is unchanged.
  std::vector<EmitterParams> ems_dis = ems;
  ems_dis[0].gamma_d += 300.0;
  ems_dis[1].gamma_d += 300.0;
  const double d_dis = dip_area(ems_dis);
  if (d_dis <= 0.0)
    throw std::runtime_error("hom_g2_zero_cw_surrogate: vanishing incoherent dip");

  return hom_g2_zero_distinguishable(pair) * (1.0 - (d_actual - d_dis) / d_dis);
}

}  // namespace qemit
