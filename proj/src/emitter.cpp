#include "qemit/emitter.hpp"

#include <cmath>

namespace qemit {

void EmitterParams::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("EmitterParams: gamma must be > 0");
  if (gamma_p < 0.0) throw std::invalid_argument("EmitterParams: gamma_p must be >= 0");
  if (gamma_d < 0.0) throw std::invalid_argument("EmitterParams: gamma_d must be >= 0");
  if (!std::isfinite(omega)) throw std::invalid_argument("EmitterParams: omega must be finite");
}

Occupations steady_state(const EmitterParams& em) {
  em.validate();
  const double tot = em.gamma + em.gamma_p;
  return {em.gamma_p / tot, em.gamma / tot};
}

void EnsembleConfig::validate() const {
  if (emitters.empty()) throw std::invalid_argument("EnsembleConfig: no emitters");
  if (emitters.size() > 8)
    throw std::invalid_argument("EnsembleConfig: at most 8 emitters supported");
  if (weights.size() != emitters.size())
    throw std::invalid_argument("EnsembleConfig: weights length must equal emitter count");
  for (const auto& em : emitters) em.validate();
  double wmax = 0.0;
  for (const auto& w : weights) wmax = std::max(wmax, std::abs(w));
  if (wmax == 0.0) throw std::invalid_argument("EnsembleConfig: all weights are zero");
  if (irf_fwhm < 0.0) throw std::invalid_argument("EnsembleConfig: irf_fwhm must be >= 0");
}

EnsembleConfig EnsembleConfig::equal_brightness(std::vector<EmitterParams> emitters,
                                                double total_intensity, double irf_fwhm) {
  EnsembleConfig cfg;
  const double n = static_cast<double>(emitters.size());
  cfg.weights.reserve(emitters.size());
  for (const auto& em : emitters) {
    const double ne = steady_state(em).n_e;
    if (ne <= 0.0)
      throw std::invalid_argument(
          "equal_brightness: emitter with zero pump has no steady-state intensity");
    cfg.weights.emplace_back(std::sqrt(total_intensity / (n * ne)), 0.0);
  }
  cfg.emitters = std::move(emitters);
  cfg.irf_fwhm = irf_fwhm;
  cfg.validate();
  return cfg;
}

void CorrelationTrace::validate() const {
  if (tau.size() != g2.size())
    throw std::invalid_argument("CorrelationTrace: tau/g2 size mismatch");
  if (!sigma.empty() && sigma.size() != tau.size())
    throw std::invalid_argument("CorrelationTrace: sigma size mismatch");
  for (std::size_t i = 1; i < tau.size(); ++i)
    if (!(tau[i] > tau[i - 1]))
      throw std::invalid_argument("CorrelationTrace: tau must be strictly increasing");
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
  return v;
}

}  // namespace qemit
