#include "qemit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "qemit/optimize.hpp"

namespace qemit {

void CoincidenceHistogram::validate() const {
  if (bin_centers.size() != counts.size())
    throw std::invalid_argument("CoincidenceHistogram: size mismatch");
  if (bin_centers.size() < 2) throw std::invalid_argument("CoincidenceHistogram: too few bins");
  if (!(bin_width > 0.0)) throw std::invalid_argument("CoincidenceHistogram: bin_width <= 0");
  for (std::size_t i = 1; i < bin_centers.size(); ++i)
    if (std::abs((bin_centers[i] - bin_centers[i - 1]) - bin_width) > 1e-6 * bin_width)
      throw std::invalid_argument("CoincidenceHistogram: non-uniform binning");
  for (double c : counts)
    if (c < 0.0) throw std::invalid_argument("CoincidenceHistogram: negative count");
}

CorrelationTrace normalize_histogram(const CoincidenceHistogram& hist, double window_lo,
                                     double window_hi) {
  hist.validate();
  double baseline = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist.bin_centers[i] >= window_lo && hist.bin_centers[i] <= window_hi) {
      baseline += hist.counts[i];
      ++m;
    }
  }
  if (m < 20) throw std::invalid_argument("normalize_histogram: baseline window has < 20 bins");
  baseline /= m;
  if (!(baseline > 0.0)) throw std::invalid_argument("normalize_histogram: zero baseline");

  const double var_b = baseline / m;  // variance of the baseline mean
  CorrelationTrace trace;
  trace.tau = hist.bin_centers;
  trace.g2.resize(hist.size());
  trace.sigma.resize(hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double c = hist.counts[i];
    trace.g2[i] = c / baseline;
    const double var_c = std::max(c, 1.0);  // Poisson, floor for empty bins
    trace.sigma[i] = std::sqrt(var_c / (baseline * baseline) +
                               c * c * var_b / std::pow(baseline, 4));
  }
  return trace;
}

std::optional<double> beat_frequency_estimate(const CorrelationTrace& trace) {
  trace.validate();
  const std::size_t n = trace.size();
  if (n < 32) return std::nullopt;
  const double dt = trace.tau[1] - trace.tau[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((trace.tau[i] - trace.tau[i - 1]) - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("beat_frequency_estimate: grid must be uniform");

  // Remove the smooth envelope with a moving average.
  int w = std::max<int>(5, static_cast<int>(n) / 16);
  if (w % 2 == 0) ++w;
  const int half = w / 2;
  std::vector<double> resid(n);
  for (int i = 0; i < static_cast<int>(n); ++i) {
    double acc = 0.0;
    for (int m = -half; m <= half; ++m) {
      int idx = std::max(0, std::min(static_cast<int>(n) - 1, i + m));
      acc += trace.g2[static_cast<std::size_t>(idx)];
    }
    resid[static_cast<std::size_t>(i)] = trace.g2[static_cast<std::size_t>(i)] - acc / w;
  }

  const double span = trace.tau.back() - trace.tau.front();
  const double omega_min = 2.0 * 2.0 * M_PI / span;  // at least two periods in the record
  const double omega_max = M_PI / dt;
  if (omega_min >= omega_max) return std::nullopt;

  const int n_scan = 2048;
  auto spectrum_at = [&](double omega) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += resid[i] * std::exp(std::complex<double>(0.0, -omega * trace.tau[i]));
    return std::abs(acc);
  };
  std::vector<double> mag(n_scan);
  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i < n_scan; ++i) {
    const double omega = omega_min + (omega_max - omega_min) * i / (n_scan - 1);
    mag[static_cast<std::size_t>(i)] = spectrum_at(omega);
    if (mag[static_cast<std::size_t>(i)] > best) {
      best = mag[static_cast<std::size_t>(i)];
      best_i = i;
    }
  }
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + n_scan / 2, sorted.end());
  const double median = sorted[n_scan / 2];
  if (best < 5.0 * median || best_i == 0 || best_i == n_scan - 1) return std::nullopt;

  // A genuine beat concentrates the detrended energy into one spectral
  // line; leakage of the smooth central structure spreads it across the
  // band. |acc(omega*)|^2 / (n sum r^2) is ~0.1 for clean beats and a few
  // percent for beat-free traces.
  double energy = 0.0;
  for (double r : resid) energy += r * r;
  if (energy <= 0.0 || best * best / (static_cast<double>(n) * energy) < 0.06)
    return std::nullopt;

  // Parabolic refinement around the scan maximum.
  const double domega = (omega_max - omega_min) / (n_scan - 1);
  const double y0 = mag[static_cast<std::size_t>(best_i - 1)];
  const double y1 = mag[static_cast<std::size_t>(best_i)];
  const double y2 = mag[static_cast<std::size_t>(best_i + 1)];
  const double denom = y0 - 2.0 * y1 + y2;
  double shift = 0.0;
  if (std::abs(denom) > 1e-300) shift = 0.5 * (y0 - y2) / denom;
  shift = std::max(-0.5, std::min(0.5, shift));
  return omega_min + domega * (best_i + shift);
}

namespace {

struct ParamLayout {
  bool fit_gamma_d;
  // per dataset indices into the nonlinear vector (-1: not fitted)
  std::vector<int> delta_idx;
  std::vector<int> gamma_tot_idx;
  int dim = 0;
};

ParamLayout make_layout(const std::vector<FitDataset>& datasets, const JointFitOptions& opts) {
  ParamLayout lay;
  lay.fit_gamma_d = opts.fit_gamma_d;
  int idx = opts.fit_gamma_d ? 1 : 0;
  for (const auto& ds : datasets) {
    lay.delta_idx.push_back(ds.fit_delta ? idx++ : -1);
    lay.gamma_tot_idx.push_back(ds.fit_gamma_tot ? idx++ : -1);
  }
  lay.dim = idx;
  return lay;
}

std::vector<double> model_curve(const FitDataset& ds, double gamma_d, double delta,
                                double gamma_tot) {
  std::vector<double> omegas(static_cast<std::size_t>(ds.n_emitters), 0.0);
  if (ds.n_emitters == 2) {
    omegas[0] = -0.5 * delta;
    omegas[1] = 0.5 * delta;
  }
  const auto params = AnalyticG2Params::uniform(ds.n_emitters, gamma_tot, gamma_d, omegas);
  CorrelationTrace model = g2_analytic(params, ds.data.tau);
  if (ds.irf_fwhm > 0.0) model = convolve_irf(model, ds.irf_fwhm);
  return model.g2;
}

struct ProfiledFit {
  double a = 1.0;
  double c = 0.0;
  double chi2 = 0.0;
};

// Weighted linear least squares for y ~ a*m + c.
ProfiledFit profile_linear(const FitDataset& ds, const std::vector<double>& m) {
  const auto& y = ds.data.g2;
  double sw = 0, swm = 0, swmm = 0, swy = 0, swmy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double s = ds.data.sigma.empty() ? 1.0 : ds.data.sigma[i];
    const double w = 1.0 / (s * s);
    sw += w;
    swm += w * m[i];
    swmm += w * m[i] * m[i];
    swy += w * y[i];
    swmy += w * m[i] * y[i];
  }
  ProfiledFit out;
  const double det = sw * swmm - swm * swm;
  if (std::abs(det) > 1e-300) {
    out.a = (sw * swmy - swm * swy) / det;
    out.c = (swmm * swy - swm * swmy) / det;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double s = ds.data.sigma.empty() ? 1.0 : ds.data.sigma[i];
    const double r = (y[i] - out.a * m[i] - out.c) / s;
    out.chi2 += r * r;
  }
  return out;
}

}  // namespace

Eigen::VectorXd curvature_errors(const Eigen::MatrixXd& jacobian) {
  const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
  const Eigen::MatrixXd cov = jtj.inverse();
  Eigen::VectorXd err(cov.rows());
  for (int i = 0; i < cov.rows(); ++i) {
    const double v = cov(i, i);
    err(i) = v > 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
  }
  return err;
}

FitResult joint_fit(const std::vector<FitDataset>& datasets, const JointFitOptions& opts) {
  if (datasets.empty()) throw std::invalid_argument("joint_fit: no datasets");
  for (const auto& ds : datasets) {
    ds.data.validate();
    if (ds.data.size() < 8) throw std::invalid_argument("joint_fit: dataset too small");
  }

  const ParamLayout lay = make_layout(datasets, opts);
  const std::size_t nds = datasets.size();

  Eigen::VectorXd x0(lay.dim), lo(lay.dim), hi(lay.dim);
  if (lay.fit_gamma_d) {
    x0(0) = opts.gamma_d_init;
    lo(0) = opts.gamma_d_lo;
    hi(0) = opts.gamma_d_hi;
  }
  for (std::size_t d = 0; d < nds; ++d) {
    const auto& ds = datasets[d];
    if (lay.delta_idx[d] >= 0) {
      double init = ds.delta_init;
      if (opts.init_delta_from_beat) {
        if (auto beat = beat_frequency_estimate(ds.data)) init = *beat;
        else init = 0.5 * (ds.delta_lo + std::min(ds.delta_hi, ds.delta_lo + 2.0));
      }
      x0(lay.delta_idx[d]) = std::min(ds.delta_hi, std::max(ds.delta_lo, init));
      lo(lay.delta_idx[d]) = ds.delta_lo;
      hi(lay.delta_idx[d]) = ds.delta_hi;
    }
    if (lay.gamma_tot_idx[d] >= 0) {
      x0(lay.gamma_tot_idx[d]) = ds.gamma_tot;
      lo(lay.gamma_tot_idx[d]) = ds.gamma_tot_lo;
      hi(lay.gamma_tot_idx[d]) = ds.gamma_tot_hi;
    }
  }

  auto extract = [&](const Eigen::VectorXd& x, std::size_t d) {
    struct Vals {
      double gamma_d, delta, gamma_tot;
    } v{};
    v.gamma_d = lay.fit_gamma_d ? x(0) : opts.gamma_d_init;
    v.delta = lay.delta_idx[d] >= 0 ? x(lay.delta_idx[d]) : datasets[d].delta_init;
    v.gamma_tot = lay.gamma_tot_idx[d] >= 0 ? x(lay.gamma_tot_idx[d]) : datasets[d].gamma_tot;
    return v;
  };

  auto objective = [&](const Eigen::VectorXd& x) {
    double chi2 = 0.0;
    for (std::size_t d = 0; d < nds; ++d) {
      const auto v = extract(x, d);
      const auto m = model_curve(datasets[d], v.gamma_d, v.delta, v.gamma_tot);
      chi2 += profile_linear(datasets[d], m).chi2;
    }
    return chi2;
  };

  FitResult result;
  Eigen::VectorXd xbest = x0;
  if (lay.dim > 0) {
    const Box bounds{lo, hi};
    MinimizeResult mr =
        multistart_minimize(objective, x0, bounds, opts.multistarts, 1e-12, opts.max_eval);
    xbest = mr.x;
    result.evaluations = mr.evaluations;
  }

  // The profiled objective is nearly flat in delta around zero and the
  // simplex can settle on a shallow local minimum there; a direct 1-D scan
  // per dataset is cheap and global.
  for (std::size_t d = 0; d < nds; ++d) {
    const int di = lay.delta_idx[d];
    if (di < 0) continue;
    auto chi_d = [&](double delta) {
      Eigen::VectorXd x = xbest;
      x(di) = delta;
      const auto v = extract(x, d);
      const auto m = model_curve(datasets[d], v.gamma_d, v.delta, v.gamma_tot);
      return profile_linear(datasets[d], m).chi2;
    };
    const int n_scan = 241;
    const double step = (hi(di) - lo(di)) / (n_scan - 1.0);
    double best_delta = xbest(di);
    double best_val = chi_d(best_delta);
    for (int i = 0; i < n_scan; ++i) {
      const double delta = lo(di) + step * i;
      const double val = chi_d(delta);
      if (val < best_val) {
        best_val = val;
        best_delta = delta;
      }
    }
    double a = std::max(lo(di), best_delta - step);
    double b = std::min(hi(di), best_delta + step);
    const double gr = 0.6180339887498949;
    for (int it = 0; it < 40; ++it) {
      const double x1 = b - gr * (b - a);
      const double x2 = a + gr * (b - a);
      if (chi_d(x1) < chi_d(x2)) b = x2; else a = x1;
    }
    double refined = 0.5 * (a + b);
    // Only claim a beat when it is statistically significant: the model
    // depends on delta at second order near zero, so noise can carve a
    // shallow spurious minimum at nonzero delta. Require a 3-sigma
    // improvement over the beat-free model.
    if (lo(di) <= 0.0 && hi(di) >= 0.0 && chi_d(0.0) <= chi_d(refined) + 9.0) {
      // Pin the parameter so the least-squares polish cannot wander back
      // into the shallow noise minimum along the degenerate direction.
      refined = 0.0;
      lo(di) = 0.0;
      hi(di) = 0.0;
    }
    xbest(di) = refined;
    result.evaluations += n_scan + 84;
  }

  // Full parameter vector (nonlinear params plus per-dataset amplitude and
  // offset) for the damped least-squares polish and the error estimate.
  const int dim_full = lay.dim + 2 * static_cast<int>(nds);
  Eigen::VectorXd xf(dim_full), lof(dim_full), hif(dim_full);
  xf.head(lay.dim) = xbest;
  lof.head(lay.dim) = lo;
  hif.head(lay.dim) = hi;
  for (std::size_t d = 0; d < nds; ++d) {
    const auto v = extract(xbest, d);
    const auto m = model_curve(datasets[d], v.gamma_d, v.delta, v.gamma_tot);
    const auto prof = profile_linear(datasets[d], m);
    const int ia = lay.dim + 2 * static_cast<int>(d);
    xf(ia) = prof.a;
    xf(ia + 1) = prof.c;
    lof(ia) = 1e-6;
    hif(ia) = 100.0;
    lof(ia + 1) = -10.0;
    hif(ia + 1) = 10.0;
  }

  int n_points = 0;
  for (const auto& ds : datasets) n_points += static_cast<int>(ds.data.size());
  auto residuals = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(n_points);
    int off = 0;
    for (std::size_t d = 0; d < nds; ++d) {
      const auto v = extract(x.head(lay.dim), d);
      const auto m = model_curve(datasets[d], v.gamma_d, v.delta, v.gamma_tot);
      const double a = x(lay.dim + 2 * static_cast<int>(d));
      const double c = x(lay.dim + 2 * static_cast<int>(d) + 1);
      const auto& ds = datasets[d];
      for (std::size_t i = 0; i < m.size(); ++i) {
        const double s = ds.data.sigma.empty() ? 1.0 : ds.data.sigma[i];
        r(off++) = (ds.data.g2[i] - a * m[i] - c) / s;
      }
    }
    return r;
  };

  const Box bounds_full{lof, hif};
  MinimizeResult lm = levenberg_marquardt(residuals, xf, bounds_full);
  result.evaluations += lm.evaluations;
  xf = lm.x;

  result.chi2 = lm.value;
  result.n_points = n_points;
  result.n_free = dim_full;
  const int dof = std::max(1, n_points - dim_full);
  result.reduced_chi2 = result.chi2 / dof;
  result.converged = true;

  // Standard errors from the curvature of chi^2 at the optimum.
  Eigen::MatrixXd jac = fd_jacobian(residuals, xf);
  Eigen::VectorXd errs = curvature_errors(jac);
  bool singular = false;
  for (int i = 0; i < errs.size(); ++i)
    if (!std::isfinite(errs(i))) singular = true;

  if (singular) {
    // Bootstrap fallback: resample whitened residuals, refit from the optimum.
    result.errors_from_bootstrap = true;
    result.message = "singular curvature matrix; errors from 100-resample bootstrap";
    const Eigen::VectorXd r0 = residuals(xf);
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<int> pick(0, n_points - 1);
    Eigen::MatrixXd samples(100, dim_full);
    for (int b = 0; b < 100; ++b) {
      // Perturb the data by resampled residuals and refit locally.
      std::vector<FitDataset> boot = datasets;
      int off = 0;
      Eigen::VectorXd rfit = residuals(xf);
      for (auto& ds : boot) {
        for (std::size_t i = 0; i < ds.data.size(); ++i) {
          const double s = ds.data.sigma.empty() ? 1.0 : ds.data.sigma[i];
          ds.data.g2[i] += (r0(pick(rng)) - rfit(off)) * s;
          ++off;
        }
      }
      JointFitOptions local = opts;
      local.multistarts = 1;
      local.init_delta_from_beat = false;
      FitResult fb = joint_fit(boot, local);
      if (lay.fit_gamma_d) samples(b, 0) = fb.gamma_d.value;
      for (std::size_t d = 0; d < nds; ++d) {
        std::size_t p = 0;
        if (lay.delta_idx[d] >= 0) samples(b, lay.delta_idx[d]) = fb.per_dataset[d][p++].value;
        if (lay.gamma_tot_idx[d] >= 0)
          samples(b, lay.gamma_tot_idx[d]) = fb.per_dataset[d][p++].value;
        const int ia = lay.dim + 2 * static_cast<int>(d);
        samples(b, ia) = fb.per_dataset[d][p].value;
        samples(b, ia + 1) = fb.per_dataset[d][p + 1].value;
      }
    }
    for (int i = 0; i < dim_full; ++i) {
      const double mean = samples.col(i).mean();
      errs(i) = std::sqrt((samples.col(i).array() - mean).square().sum() / 99.0);
    }
  }

  auto near_bound = [](double v, double l, double h) {
    const double span = h - l;
    return v - l < 1e-6 * span || h - v < 1e-6 * span;
  };
  if (lay.fit_gamma_d) {
    result.gamma_d = {"gamma_d", xf(0), errs(0), near_bound(xf(0), lo(0), hi(0))};
  } else {
    result.gamma_d = {"gamma_d", opts.gamma_d_init, 0.0, false};
  }
  result.per_dataset.resize(nds);
  for (std::size_t d = 0; d < nds; ++d) {
    auto& list = result.per_dataset[d];
    if (lay.delta_idx[d] >= 0) {
      const int i = lay.delta_idx[d];
      list.push_back({"delta", xf(i), errs(i), near_bound(xf(i), lo(i), hi(i))});
    }
    if (lay.gamma_tot_idx[d] >= 0) {
      const int i = lay.gamma_tot_idx[d];
      list.push_back({"gamma_tot", xf(i), errs(i), near_bound(xf(i), lo(i), hi(i))});
    }
    const int ia = lay.dim + 2 * static_cast<int>(d);
    list.push_back({"amplitude", xf(ia), errs(ia), false});
    list.push_back({"offset", xf(ia + 1), errs(ia + 1), false});
  }
  return result;
}

}  // namespace qemit
