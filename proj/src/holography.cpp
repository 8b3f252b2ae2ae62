#include "qemit/holography.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace qemit {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Swap quadrants (even dimensions only, guaranteed by the grid invariant).
Eigen::ArrayXXcd fftshift(const Eigen::ArrayXXcd& a) {
  const int r = static_cast<int>(a.rows()), c = static_cast<int>(a.cols());
  Eigen::ArrayXXcd out(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out((i + r / 2) % r, (j + c / 2) % c) = a(i, j);
  return out;
}

Eigen::ArrayXXcd fft2(const Eigen::ArrayXXcd& in, int sign) {
  const int ny = static_cast<int>(in.rows()), nx = static_cast<int>(in.cols());
  // FFTW is row-major; Eigen arrays are column-major, so transpose on the
  // way in and out by treating dims swapped.
  Eigen::ArrayXXcd src = in;
  Eigen::ArrayXXcd dst(ny, nx);
  fftw_plan plan = fftw_plan_dft_2d(
      nx, ny, reinterpret_cast<fftw_complex*>(src.data()),
      reinterpret_cast<fftw_complex*>(dst.data()), sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return dst;
}

}  // namespace

void OpticalGrid::validate() const {
  if (!power_of_two(nx) || !power_of_two(ny))
    throw std::invalid_argument("OpticalGrid: nx, ny must be powers of two");
  if (!(pitch > 0.0) || !(wavelength > 0.0) || !(f_eff > 0.0))
    throw std::invalid_argument("OpticalGrid: pitch, wavelength, f_eff must be > 0");
}

double ComplexField::power() const {
  return amp.abs2().sum() * pixel_x() * pixel_y();
}

double wrap_phase(double phi) {
  phi = std::fmod(phi + M_PI, 2.0 * M_PI);
  if (phi < 0.0) phi += 2.0 * M_PI;
  return phi - M_PI;
}

ComplexField plane_wave_mode(const SpotSpec& spot, const OpticalGrid& grid) {
  grid.validate();
  const double fx = spot.x / (grid.wavelength * grid.f_um());  // cycles/um
  const double fy = spot.y / (grid.wavelength * grid.f_um());
  if (std::abs(fx) > 0.5 / grid.pitch || std::abs(fy) > 0.5 / grid.pitch)
    throw std::invalid_argument("plane_wave_mode: spot beyond the grid Nyquist limit");

  ComplexField field;
  field.grid = grid;
  field.plane = Plane::slm;
  field.amp.resize(grid.ny, grid.nx);
  const double norm = 1.0 / (std::sqrt(static_cast<double>(grid.nx) * grid.ny) * grid.pitch);
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y = (iy - grid.ny / 2) * grid.pitch;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = (ix - grid.nx / 2) * grid.pitch;
      field.amp(iy, ix) =
          std::polar(norm, 2.0 * M_PI * (fx * x + fy * y));
    }
  }
  return field;
}

ComplexField gaussian_mode(double cx, double cy, double waist, const OpticalGrid& grid) {
  grid.validate();
  if (waist < 2.0 * grid.focal_pitch_x() || waist < 2.0 * grid.focal_pitch_y())
    throw std::invalid_argument("gaussian_mode: waist under-resolved by the focal grid");
  ComplexField field;
  field.grid = grid;
  field.plane = Plane::focal;
  field.amp.resize(grid.ny, grid.nx);
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y = (iy - grid.ny / 2) * grid.focal_pitch_y() - cy;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = (ix - grid.nx / 2) * grid.focal_pitch_x() - cx;
      field.amp(iy, ix) = std::exp(-(x * x + y * y) / (waist * waist));
    }
  }
  field.amp /= std::sqrt(field.power());
  return field;
}

ComplexField propagate_lens(const ComplexField& field) {
  if (field.plane != Plane::slm)
    throw std::invalid_argument("propagate_lens: field must be at the SLM plane");
  ComplexField out;
  out.grid = field.grid;
  out.plane = Plane::focal;
  const double scale = field.grid.pitch /
                       (field.grid.focal_pitch_x() *
                        std::sqrt(static_cast<double>(field.grid.nx) * field.grid.ny));
  out.amp = fftshift(fft2(fftshift(field.amp), FFTW_FORWARD)) * scale;
  return out;
}

ComplexField backpropagate_lens(const ComplexField& field) {
  if (field.plane != Plane::focal)
    throw std::invalid_argument("backpropagate_lens: field must be at the focal plane");
  ComplexField out;
  out.grid = field.grid;
  out.plane = Plane::slm;
  const double scale = field.grid.focal_pitch_x() /
                       (field.grid.pitch *
                        std::sqrt(static_cast<double>(field.grid.nx) * field.grid.ny));
  out.amp = fftshift(fft2(fftshift(field.amp), FFTW_BACKWARD)) * scale;
  return out;
}

ComplexField apply_mask(const ComplexField& field, const PhaseMask& mask) {
  if (!(field.grid == mask.grid))
    throw std::invalid_argument("apply_mask: grid mismatch");
  ComplexField out = field;
  out.amp = field.amp * (std::complex<double>(0.0, 1.0) * mask.phase).exp();
  return out;
}

ComplexField apply_pupil(const ComplexField& field, double radius_um) {
  ComplexField out = field;
  const auto& g = field.grid;
  for (int iy = 0; iy < g.ny; ++iy) {
    const double y = (iy - g.ny / 2) * field.pixel_y();
    for (int ix = 0; ix < g.nx; ++ix) {
      const double x = (ix - g.nx / 2) * field.pixel_x();
      if (x * x + y * y > radius_um * radius_um) out.amp(iy, ix) = 0.0;
    }
  }
  return out;
}

double coupling_efficiency(const ComplexField& field, const ComplexField& mode) {
  if (!(field.grid == mode.grid) || field.plane != mode.plane)
    throw std::invalid_argument("coupling_efficiency: grid/plane mismatch");
  const std::complex<double> inner =
      (field.amp * mode.amp.conjugate()).sum() * field.pixel_x() * field.pixel_y();
  return std::norm(inner);
}

PhaseMask multiplex_hologram(const std::vector<SpotSpec>& spots, const OpticalGrid& grid,
                             double carrier_kx, double carrier_ky) {
  if (spots.empty()) throw std::invalid_argument("multiplex_hologram: no spots");
  double wmax = 0.0;
  for (const auto& s : spots) wmax = std::max(wmax, std::abs(s.weight));
  if (wmax == 0.0) throw std::invalid_argument("multiplex_hologram: all weights are zero");

  Eigen::ArrayXXcd sum = Eigen::ArrayXXcd::Zero(grid.ny, grid.nx);
  for (const auto& s : spots) sum += s.weight * plane_wave_mode(s, grid).amp;

  PhaseMask mask;
  mask.grid = grid;
  mask.carrier_kx = carrier_kx;
  mask.carrier_ky = carrier_ky;
  mask.phase.resize(grid.ny, grid.nx);
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y = (iy - grid.ny / 2) * grid.pitch;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = (ix - grid.nx / 2) * grid.pitch;
      mask.phase(iy, ix) =
          wrap_phase(std::arg(sum(iy, ix)) + carrier_kx * x + carrier_ky * y);
    }
  }
  return mask;
}

SpotPowers measure_spot_powers(const std::vector<SpotSpec>& spots, const PhaseMask& mask,
                               int window_half) {
  const auto& g = mask.grid;
  ComplexField uniform;
  uniform.grid = g;
  uniform.plane = Plane::slm;
  uniform.amp = Eigen::ArrayXXcd::Constant(
      g.ny, g.nx, 1.0 / (std::sqrt(static_cast<double>(g.nx) * g.ny) * g.pitch));
  const ComplexField far = propagate_lens(apply_mask(uniform, mask));

  SpotPowers out;
  double wsum = 0.0;
  for (const auto& s : spots) wsum += std::norm(s.weight);
  double total = 0.0;
  for (const auto& s : spots) {
    const int ix = g.nx / 2 + static_cast<int>(std::lround(s.x / g.focal_pitch_x()));
    const int iy = g.ny / 2 + static_cast<int>(std::lround(s.y / g.focal_pitch_y()));
    double p = 0.0;
    for (int dy = -window_half; dy <= window_half; ++dy)
      for (int dx = -window_half; dx <= window_half; ++dx) {
        const int jx = ix + dx, jy = iy + dy;
        if (jx >= 0 && jx < g.nx && jy >= 0 && jy < g.ny) p += std::norm(far.amp(jy, jx));
      }
    out.fraction.push_back(p);
    out.target.push_back(std::norm(s.weight) / wsum);
    total += p;
  }
  for (auto& f : out.fraction) f /= total;
  for (std::size_t k = 0; k < spots.size(); ++k)
    out.max_relative_error = std::max(
        out.max_relative_error, std::abs(out.fraction[k] - out.target[k]) / out.target[k]);
  return out;
}

BalanceResult balance_spot_weights(std::vector<SpotSpec> spots, const OpticalGrid& grid,
                                   double tol, int max_iter) {
  BalanceResult result;
  std::vector<double> targets;
  double wsum = 0.0;
  for (const auto& s : spots) wsum += std::norm(s.weight);
  for (const auto& s : spots) targets.push_back(std::norm(s.weight) / wsum);

  for (int iter = 0; iter < max_iter; ++iter) {
    PhaseMask mask = multiplex_hologram(spots, grid);
    SpotPowers powers = measure_spot_powers(spots, mask);
    // Keep the requested shares as the fixed target of the loop.
    powers.target = targets;
    powers.max_relative_error = 0.0;
    for (std::size_t k = 0; k < spots.size(); ++k)
      powers.max_relative_error =
          std::max(powers.max_relative_error,
                   std::abs(powers.fraction[k] - targets[k]) / targets[k]);
    result.mask = std::move(mask);
    result.powers = powers;
    result.iterations = iter + 1;
    if (powers.max_relative_error < tol) {
      result.converged = true;
      break;
    }
    for (std::size_t k = 0; k < spots.size(); ++k) {
      const double gain = std::sqrt(targets[k] / std::max(powers.fraction[k], 1e-12));
      spots[k].weight *= std::pow(gain, 0.7);  // damped update
    }
    double norm = 0.0;
    for (const auto& s : spots) norm += std::norm(s.weight);
    for (auto& s : spots) s.weight /= std::sqrt(norm);
  }
  result.spots = std::move(spots);
  return result;
}

WavefrontMatchResult wavefront_match(const std::vector<ComplexField>& inputs,
                                     const std::vector<ComplexField>& targets,
                                     int max_iter, double tol) {
  if (inputs.empty() || inputs.size() != targets.size())
    throw std::invalid_argument("wavefront_match: inputs/targets must be equal-length");
  for (std::size_t m = 0; m < inputs.size(); ++m)
    if (!(inputs[m].grid == targets[m].grid) || inputs[m].plane != Plane::slm ||
        targets[m].plane != Plane::slm)
      throw std::invalid_argument("wavefront_match: all fields must be at the SLM plane");

  const auto& g = inputs[0].grid;
  const double area = g.pitch * g.pitch;
  WavefrontMatchResult result;
  result.mask.grid = g;
  result.mask.phase = Eigen::ArrayXXd::Zero(g.ny, g.nx);

  auto couplings_for = [&](const Eigen::ArrayXXd& phase) {
    std::vector<std::complex<double>> overlaps;
    std::vector<double> etas;
    const Eigen::ArrayXXcd e = (std::complex<double>(0.0, 1.0) * phase).exp();
    for (std::size_t m = 0; m < inputs.size(); ++m) {
      const std::complex<double> c =
          (targets[m].amp.conjugate() * e * inputs[m].amp).sum() * area;
      overlaps.push_back(c);
      etas.push_back(std::norm(c) / (inputs[m].power() * targets[m].power()));
    }
    return std::pair(overlaps, etas);
  };

  auto [overlaps, etas] = couplings_for(result.mask.phase);
  double mean = 0.0;
  for (double e : etas) mean += e;
  mean /= etas.size();
  result.history.push_back(etas);

  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::ArrayXXcd acc = Eigen::ArrayXXcd::Zero(g.ny, g.nx);
    for (std::size_t m = 0; m < inputs.size(); ++m)
      acc += overlaps[m] * targets[m].amp * inputs[m].amp.conjugate();
    Eigen::ArrayXXd phase(g.ny, g.nx);
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) phase(iy, ix) = std::arg(acc(iy, ix));

    auto [ov_new, eta_new] = couplings_for(phase);
    double mean_new = 0.0;
    for (double e : eta_new) mean_new += e;
    mean_new /= eta_new.size();
    result.iterations = iter + 1;
    if (mean_new < mean - 1e-12) {
      result.stalled = true;  // non-improvement; keep the previous mask
      break;
    }
    result.mask.phase = std::move(phase);
    overlaps = std::move(ov_new);
    etas = std::move(eta_new);
    result.history.push_back(etas);
    const double gain = mean_new - mean;
    mean = mean_new;
    if (gain < tol) break;
  }
  result.couplings = etas;
  return result;
}

TransferMatrix realized_transfer_matrix(const PhaseMask& mask,
                                        const std::vector<ComplexField>& inputs,
                                        const std::vector<ComplexField>& outputs) {
  if (inputs.size() != 2 || outputs.size() != 2)
    throw std::invalid_argument("realized_transfer_matrix: expects 2 inputs and 2 outputs");
  TransferMatrix out;
  for (int j = 0; j < 2; ++j) {
    const ComplexField far = propagate_lens(apply_mask(inputs[static_cast<std::size_t>(j)], mask));
    for (int i = 0; i < 2; ++i) {
      const auto& mode = outputs[static_cast<std::size_t>(i)];
      out.m(i, j) = (far.amp * mode.amp.conjugate()).sum() * far.pixel_x() * far.pixel_y();
    }
  }
  out.mean_transmission = 0.5 * (out.m.col(0).squaredNorm() + out.m.col(1).squaredNorm());
  out.unitarity_deviation =
      (out.m.adjoint() * out.m - out.mean_transmission * Eigen::Matrix2cd::Identity()).norm();
  return out;
}

}  // namespace qemit
