#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qemit/emitter.hpp"

namespace qemit {

using Matrix = Eigen::MatrixXcd;

// Density matrix of the 2^N product space with its physicality checks.
struct DensityOperator {
  Matrix rho;

  int dim() const { return static_cast<int>(rho.rows()); }
  double trace_error() const;      // |tr(rho) - 1|
  double hermiticity_error() const;  // max |rho - rho^dagger|
  double min_eigenvalue() const;
  void validate(double trace_tol = 1e-9, double herm_tol = 1e-12,
                double eig_tol = -1e-9) const;
};

// Lindblad generator of N independently pumped/decaying/dephasing emitters,
// applied matrix-free on the 2^N x 2^N density matrix. Basis index bit k is
// the excitation of emitter k.
class ProductLindbladian {
 public:
  explicit ProductLindbladian(std::vector<EmitterParams> emitters);

  int num_emitters() const { return static_cast<int>(emitters_.size()); }
  int dim() const { return dim_; }
  const std::vector<EmitterParams>& emitters() const { return emitters_; }

  // L(rho)
  Matrix apply(const Matrix& rho) const;

  // Product of single-emitter steady states (diagonal in this basis).
  DensityOperator steady_state() const;

 private:
  std::vector<EmitterParams> emitters_;
  int dim_;
  Matrix decay_coeff_;  // elementwise coefficient of rho in L(rho)
};

struct EvolveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double max_step = 0.0;  // 0: unrestricted
};

struct EvolveStats {
  long steps = 0;
  long rejected = 0;
};

// Adaptive Dormand-Prince integration of d(rho)/dt = L(rho) over [0, t].
// Works on general (not necessarily trace-1) matrices so it can evolve
// collapsed states for correlation functions.
Matrix evolve(const ProductLindbladian& gen, Matrix rho, double t,
              const EvolveOptions& opts = {}, EvolveStats* stats = nullptr);

inline DensityOperator evolve(const ProductLindbladian& gen, const DensityOperator& rho0,
                              double t, const EvolveOptions& opts = {}) {
  return DensityOperator{evolve(gen, rho0.rho, t, opts)};
}

}  // namespace qemit
