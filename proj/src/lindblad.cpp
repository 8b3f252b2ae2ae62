#include "qemit/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace qemit {

double DensityOperator::trace_error() const { return std::abs(rho.trace() - 1.0); }

double DensityOperator::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  return es.eigenvalues().minCoeff();
}

void DensityOperator::validate(double trace_tol, double herm_tol, double eig_tol) const {
  if (trace_error() > trace_tol)
    throw std::runtime_error("DensityOperator: trace deviates from 1");
  if (hermiticity_error() > herm_tol)
    throw std::runtime_error("DensityOperator: not Hermitian");
  if (min_eigenvalue() < eig_tol)
    throw std::runtime_error("DensityOperator: negative eigenvalue");
}

ProductLindbladian::ProductLindbladian(std::vector<EmitterParams> emitters)
    : emitters_(std::move(emitters)) {
  if (emitters_.empty()) throw std::invalid_argument("ProductLindbladian: no emitters");
  if (emitters_.size() > 8)
    throw std::invalid_argument("ProductLindbladian: dimension guard, at most 8 emitters");
  for (const auto& em : emitters_) em.validate();
  dim_ = 1 << emitters_.size();

  decay_coeff_.resize(dim_, dim_);
  const std::complex<double> I(0.0, 1.0);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      std::complex<double> c = 0.0;
      for (std::size_t k = 0; k < emitters_.size(); ++k) {
        const auto& em = emitters_[k];
        const double bi = (i >> k) & 1 ? 1.0 : 0.0;
        const double bj = (j >> k) & 1 ? 1.0 : 0.0;
        c += -I * em.omega * (bi - bj);
        c += -0.5 * em.gamma * (bi + bj);
        c += -0.5 * em.gamma_p * (2.0 - bi - bj);
        c += em.gamma_d * (bi * bj - 0.5 * (bi + bj));
      }
      decay_coeff_(i, j) = c;
    }
  }
}

Matrix ProductLindbladian::apply(const Matrix& rho) const {
  Matrix out = decay_coeff_.cwiseProduct(rho);
  for (std::size_t k = 0; k < emitters_.size(); ++k) {
    const int b = 1 << k;
    const double gd = emitters_[k].gamma;
    const double gp = emitters_[k].gamma_p;
    for (int i = 0; i < dim_; ++i) {
      if (i & b) continue;
      for (int j = 0; j < dim_; ++j) {
        if (j & b) continue;
        out(i, j) += gd * rho(i | b, j | b);       // sigma^- rho sigma^+
        out(i | b, j | b) += gp * rho(i, j);       // sigma^+ rho sigma^-
      }
    }
  }
  return out;
}

DensityOperator ProductLindbladian::steady_state() const {
  Matrix rho = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    double p = 1.0;
    for (std::size_t k = 0; k < emitters_.size(); ++k) {
      const auto occ = qemit::steady_state(emitters_[k]);
      p *= ((i >> k) & 1) ? occ.n_e : occ.n_g;
    }
    rho(i, i) = p;
  }
  return DensityOperator{std::move(rho)};
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

}  // namespace

Matrix evolve(const ProductLindbladian& gen, Matrix rho, double t, const EvolveOptions& opts,
              EvolveStats* stats) {
  if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  if (rho.rows() != gen.dim() || rho.cols() != gen.dim())
    throw std::invalid_argument("evolve: dimension mismatch");
  if (t == 0.0) return rho;

  const double atol = opts.abs_tol, rtol = opts.rel_tol;
  Matrix k1 = gen.apply(rho);
  double h = std::min(t, 0.01);
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  double time = 0.0;
  long steps = 0, rejected = 0;
  const long max_steps = 20'000'000;

  while (time < t) {
    h = std::min(h, t - time);
    Matrix k2 = gen.apply(rho + h * kA21 * k1);
    Matrix k3 = gen.apply(rho + h * (kA31 * k1 + kA32 * k2));
    Matrix k4 = gen.apply(rho + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    Matrix k5 = gen.apply(rho + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    Matrix k6 =
        gen.apply(rho + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    Matrix ynew = rho + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    Matrix k7 = gen.apply(ynew);
    Matrix err =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    double err_norm = 0.0;
    for (int i = 0; i < err.rows(); ++i)
      for (int j = 0; j < err.cols(); ++j) {
        const double scale =
            atol + rtol * std::max(std::abs(rho(i, j)), std::abs(ynew(i, j)));
        err_norm = std::max(err_norm, std::abs(err(i, j)) / scale);
      }

    if (err_norm <= 1.0) {
      time += h;
      rho = std::move(ynew);
      k1 = std::move(k7);  // FSAL
      ++steps;
    } else {
      ++rejected;
    }
    double factor = 0.9 * std::pow(std::max(err_norm, 1e-16), -0.2);
    factor = std::min(5.0, std::max(0.2, factor));
    h *= factor;
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    if (steps + rejected > max_steps)
      throw std::runtime_error("evolve: integrator failed to converge (steps=" +
                               std::to_string(steps) + ", rejected=" +
                               std::to_string(rejected) + ", h=" + std::to_string(h) + ")");
  }
  if (stats) {
    stats->steps = steps;
    stats->rejected = rejected;
  }
  return rho;
}

}  // namespace qemit
