#pragma once

#include "qemit/lindblad.hpp"

namespace qemit {

// Brute-force correlation functions by the quantum regression theorem:
// collapse the steady state with the collective lowering operator, evolve
// under the full generator, read out the collective intensity.

// Collective lowering operator sum_k w_k sigma_k^- on the product space.
Matrix collective_lowering(const std::vector<std::complex<double>>& weights, int n_emitters);

// Steady-state detected intensity <sigma_C^+ sigma_C^-> for the given weights.
double steady_intensity(const ProductLindbladian& gen,
                        const std::vector<std::complex<double>>& weights);

// Common-mode HBT g2(tau); tau_grid must be non-negative and increasing.
CorrelationTrace g2_oracle(const EnsembleConfig& ensemble, const std::vector<double>& tau_grid,
                           const EvolveOptions& opts = {});

// Normalized cross-correlation between two collective output ports.
// tau_grid may span negative values: g2x(-tau) is computed with the roles of
// the two ports exchanged.
CorrelationTrace cross_correlation_oracle(const std::vector<EmitterParams>& emitters,
                                          const std::vector<std::complex<double>>& weights_b1,
                                          const std::vector<std::complex<double>>& weights_b2,
                                          const std::vector<double>& tau_grid,
                                          const EvolveOptions& opts = {});

}  // namespace qemit
