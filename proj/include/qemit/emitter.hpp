#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qemit {

// A two-level emitter in the rotating frame of the ensemble mean frequency.
// omega is the angular frequency offset (rad/ns); only differences between
// emitters are physical.
struct EmitterParams {
  double omega = 0.0;    // rad/ns, offset from common rotating frame
  double gamma = 1.0;    // radiative decay rate, ns^-1
  double gamma_p = 0.0;  // incoherent pump rate, ns^-1
  double gamma_d = 0.0;  // pure dephasing rate, ns^-1

  void validate() const;
};

// Steady-state occupations (n_e, n_g) of a single CW-pumped emitter.
struct Occupations {
  double n_e;
  double n_g;
};

Occupations steady_state(const EmitterParams& em);

// N emitters plus the complex collection weights w_k that define the
// collective operator sum_k w_k sigma_k^+ seen by the detector.
struct EnsembleConfig {
  std::vector<EmitterParams> emitters;
  std::vector<std::complex<double>> weights;
  double irf_fwhm = 0.0;  // ns; 0 disables detector-response convolution

  int size() const { return static_cast<int>(emitters.size()); }
  void validate() const;

  // Weights chosen so each emitter contributes equally to the detected
  // intensity: N |w_k|^2 n_k^e = total_intensity.
  static EnsembleConfig equal_brightness(std::vector<EmitterParams> emitters,
                                         double total_intensity = 1.0,
                                         double irf_fwhm = 0.0);
};

// tau grid with g2 values; sigma holds per-bin standard errors when known.
struct CorrelationTrace {
  std::vector<double> tau;  // ns, strictly increasing
  std::vector<double> g2;
  std::vector<double> sigma;  // empty when uncertainties are not tracked

  std::size_t size() const { return tau.size(); }
  void validate() const;
};

// Uniform grid helper: n points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace qemit
