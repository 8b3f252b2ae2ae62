#include "qemit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qemit {

Eigen::VectorXd Box::clamp(Eigen::VectorXd x) const {
  for (int i = 0; i < x.size(); ++i) x(i) = std::min(hi(i), std::max(lo(i), x(i)));
  return x;
}

MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Box& bounds,
                           double ftol, int max_eval) {
  const int n = static_cast<int>(x0.size());
  if (bounds.dim() != n) throw std::invalid_argument("nelder_mead: bounds dimension mismatch");
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(bounds.clamp(x));
  };

  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1));
  std::vector<double> fv(static_cast<std::size_t>(n + 1));
  simplex[0] = bounds.clamp(x0);
  fv[0] = eval(simplex[0]);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = simplex[0];
    const double span = bounds.hi(i) - bounds.lo(i);
    double step = 0.05 * span;
    if (step == 0.0) step = 1e-8;
    v(i) = (v(i) + step <= bounds.hi(i)) ? v(i) + step : v(i) - step;
    simplex[static_cast<std::size_t>(i + 1)] = v;
    fv[static_cast<std::size_t>(i + 1)] = eval(v);
  }

  auto order = [&] {
    std::vector<int> idx(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return fv[static_cast<std::size_t>(a)] < fv[static_cast<std::size_t>(b)];
    });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> f2;
    for (int i : idx) {
      s2.push_back(simplex[static_cast<std::size_t>(i)]);
      f2.push_back(fv[static_cast<std::size_t>(i)]);
    }
    simplex = std::move(s2);
    fv = std::move(f2);
  };

  MinimizeResult result;
  while (evals < max_eval) {
    order();
    if (std::abs(fv[static_cast<std::size_t>(n)] - fv[0]) <=
        ftol * (std::abs(fv[0]) + ftol)) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[static_cast<std::size_t>(i)];
    centroid /= static_cast<double>(n);
    const Eigen::VectorXd& worst = simplex[static_cast<std::size_t>(n)];

    Eigen::VectorXd xr = bounds.clamp(centroid + (centroid - worst));
    const double fr = eval(xr);
    if (fr < fv[0]) {
      Eigen::VectorXd xe = bounds.clamp(centroid + 2.0 * (centroid - worst));
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[static_cast<std::size_t>(n)] = xe;
        fv[static_cast<std::size_t>(n)] = fe;
      } else {
        simplex[static_cast<std::size_t>(n)] = xr;
        fv[static_cast<std::size_t>(n)] = fr;
      }
    } else if (fr < fv[static_cast<std::size_t>(n - 1)]) {
      simplex[static_cast<std::size_t>(n)] = xr;
      fv[static_cast<std::size_t>(n)] = fr;
    } else {
      Eigen::VectorXd xc = bounds.clamp(centroid + 0.5 * (worst - centroid));
      const double fc = eval(xc);
      if (fc < fv[static_cast<std::size_t>(n)]) {
        simplex[static_cast<std::size_t>(n)] = xc;
        fv[static_cast<std::size_t>(n)] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[static_cast<std::size_t>(i)] =
              bounds.clamp(simplex[0] + 0.5 * (simplex[static_cast<std::size_t>(i)] - simplex[0]));
          fv[static_cast<std::size_t>(i)] = eval(simplex[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  order();
  result.x = simplex[0];
  result.value = fv[0];
  result.evaluations = evals;
  return result;
}

std::vector<Eigen::VectorXd> halton_points(int count, int dim) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                               37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79};
  if (dim > static_cast<int>(sizeof(primes) / sizeof(primes[0])))
    throw std::invalid_argument("halton_points: dimension too large");
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    Eigen::VectorXd p(dim);
    for (int d = 0; d < dim; ++d) {
      const int base = primes[d];
      double f = 1.0, r = 0.0;
      int n = i;
      while (n > 0) {
        f /= base;
        r += f * (n % base);
        n /= base;
      }
      p(d) = r;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

MinimizeResult multistart_minimize(const Objective& f, const Eigen::VectorXd& x0,
                                   const Box& bounds, int starts, double ftol, int max_eval) {
  MinimizeResult best = nelder_mead(f, x0, bounds, ftol, max_eval);
  const auto pts = halton_points(std::max(0, starts - 1), bounds.dim());
  for (const auto& u : pts) {
    Eigen::VectorXd x = bounds.lo + u.cwiseProduct(bounds.hi - bounds.lo);
    MinimizeResult r = nelder_mead(f, x, bounds, ftol, max_eval);
    r.evaluations += best.evaluations;
    if (r.value < best.value) best = std::move(r);
    else best.evaluations = r.evaluations;
  }
  return best;
}

Eigen::MatrixXd fd_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& x, double step) {
  const Eigen::VectorXd r0 = residuals(x);
  Eigen::MatrixXd jac(r0.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(x(j)));
    Eigen::VectorXd xp = x;
    xp(j) += h;
    jac.col(j) = (residuals(xp) - r0) / h;
  }
  return jac;
}

MinimizeResult levenberg_marquardt(const ResidualFn& residuals, const Eigen::VectorXd& x0,
                                   const Box& bounds, const LmOptions& opts) {
  Eigen::VectorXd x = bounds.clamp(x0);
  Eigen::VectorXd r = residuals(x);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  MinimizeResult result;
  result.evaluations = 1;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const Eigen::MatrixXd jac = fd_jacobian(residuals, x, opts.fd_step);
    result.evaluations += static_cast<int>(x.size());
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    if (g.cwiseAbs().maxCoeff() < opts.gtol) {
      result.converged = true;
      break;
    }
    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      const Eigen::VectorXd xn = bounds.clamp(x + step);
      const Eigen::VectorXd rn = residuals(xn);
      ++result.evaluations;
      const double cn = rn.squaredNorm();
      if (cn < cost) {
        if ((xn - x).cwiseAbs().maxCoeff() < opts.xtol) {
          x = xn;
          r = rn;
          cost = cn;
          result.converged = true;
        } else {
          x = xn;
          r = rn;
          cost = cn;
        }
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || result.converged) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.value = cost;
  return result;
}

}  // namespace qemit
