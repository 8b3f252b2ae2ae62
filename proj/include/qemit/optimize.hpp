#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace qemit {

using Objective = std::function<double(const Eigen::VectorXd&)>;
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Eigen::VectorXd clamp(Eigen::VectorXd x) const;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Bounded Nelder-Mead simplex; out-of-box trial points are projected back.
MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Box& bounds,
                           double ftol = 1e-10, int max_eval = 4000);

// Deterministic low-discrepancy points in [0,1]^dim (Halton, prime bases).
std::vector<Eigen::VectorXd> halton_points(int count, int dim);

// Best of `starts` Nelder-Mead runs seeded from Halton points spread over the
// box (plus the supplied initial guess).
MinimizeResult multistart_minimize(const Objective& f, const Eigen::VectorXd& x0,
                                   const Box& bounds, int starts, double ftol = 1e-10,
                                   int max_eval = 4000);

struct LmOptions {
  int max_iter = 200;
  double gtol = 1e-12;
  double xtol = 1e-12;
  double fd_step = 1e-6;
};

// Damped least squares with a forward-difference Jacobian; steps are clamped
// to the box. Minimizes |r(x)|^2.
MinimizeResult levenberg_marquardt(const ResidualFn& residuals, const Eigen::VectorXd& x0,
                                   const Box& bounds, const LmOptions& opts = {});

// Forward-difference Jacobian of `residuals` at x.
Eigen::MatrixXd fd_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& x,
                            double step = 1e-6);

}  // namespace qemit
