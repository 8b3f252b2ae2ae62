#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qemit {

// Sampled transverse plane. Pixels are square; the SLM plane and the focal
// (sample) plane share the grid, with focal-plane pixel size
// lambda * f_eff / (n * pitch).
struct OpticalGrid {
  int nx = 512;
  int ny = 512;
  double pitch = 10.0;       // um per SLM pixel
  double wavelength = 0.971;  // um
  double f_eff = 0.309;       // mm, effective focal length of the relay

  double f_um() const { return f_eff * 1000.0; }
  double focal_pitch_x() const { return wavelength * f_um() / (nx * pitch); }
  double focal_pitch_y() const { return wavelength * f_um() / (ny * pitch); }
  void validate() const;
  bool operator==(const OpticalGrid&) const = default;
};

enum class Plane { slm, focal };

// Sampled complex field. amp(row, col) = amp(iy, ix); coordinates are
// centered, x = (ix - nx/2) * pixel.
struct ComplexField {
  OpticalGrid grid;
  Plane plane = Plane::slm;
  Eigen::ArrayXXcd amp;

  double pixel_x() const { return plane == Plane::slm ? grid.pitch : grid.focal_pitch_x(); }
  double pixel_y() const { return plane == Plane::slm ? grid.pitch : grid.focal_pitch_y(); }
  double power() const;
};

// Phase-only hologram; phase wrapped into [-pi, pi). carrier records the
// blazed-grating spatial frequency folded into the phase.
struct PhaseMask {
  OpticalGrid grid;
  Eigen::ArrayXXd phase;
  double carrier_kx = 0.0;  // rad/um
  double carrier_ky = 0.0;
};

// Target position in the sample plane plus its complex routing weight.
struct SpotSpec {
  double x = 0.0;  // um
  double y = 0.0;
  std::complex<double> weight{1.0, 0.0};
};

double wrap_phase(double phi);  // into [-pi, pi)

// Unit-power plane wave at the SLM plane whose focus lands at the spot
// position; throws when the spot exceeds the grid Nyquist limit.
ComplexField plane_wave_mode(const SpotSpec& spot, const OpticalGrid& grid);

// Unit-power Gaussian (fiber fundamental mode) in the focal plane.
ComplexField gaussian_mode(double cx, double cy, double waist, const OpticalGrid& grid);

// Unitary lens transform, SLM plane -> focal plane. Parseval-exact.
ComplexField propagate_lens(const ComplexField& field);
// Inverse transform, focal plane -> SLM plane.
ComplexField backpropagate_lens(const ComplexField& field);

ComplexField apply_mask(const ComplexField& field, const PhaseMask& mask);

// Zeroes the field outside a centered circular pupil of the given radius.
ComplexField apply_pupil(const ComplexField& field, double radius_um);

// |<mode|field>|^2 with the discrete area element; both fields must live on
// the same grid and plane.
double coupling_efficiency(const ComplexField& field, const ComplexField& mode);

// Phase of the weighted superposition of spot modes plus a carrier grating.
PhaseMask multiplex_hologram(const std::vector<SpotSpec>& spots, const OpticalGrid& grid,
                             double carrier_kx = 0.0, double carrier_ky = 0.0);

struct SpotPowers {
  std::vector<double> fraction;       // per-spot share of total window power
  std::vector<double> target;         // requested share
  double max_relative_error = 0.0;
};

// Power captured in (2*half+1)^2 windows around each spot after illuminating
// the hologram with a uniform beam.
SpotPowers measure_spot_powers(const std::vector<SpotSpec>& spots, const PhaseMask& mask,
                               int window_half = 2);

struct BalanceResult {
  std::vector<SpotSpec> spots;  // adjusted weights
  PhaseMask mask;
  SpotPowers powers;
  int iterations = 0;
  bool converged = false;
};

// Iterative amplitude reweighting: phase-only encoding distorts multiplexed
// weight ratios, so |w_k| is adjusted until the simulated per-spot powers
// match the requested shares within `tol` (relative).
BalanceResult balance_spot_weights(std::vector<SpotSpec> spots, const OpticalGrid& grid,
                                   double tol = 0.01, int max_iter = 60);

struct WavefrontMatchResult {
  PhaseMask mask;
  std::vector<double> couplings;               // final, per mode
  std::vector<std::vector<double>> history;    // per iteration
  int iterations = 0;
  bool stalled = false;
};

// Single-layer wavefront matching: inputs and (back-propagated) targets both
// live at the SLM plane; the phase is repeatedly set to the argument of the
// overlap-weighted sum of input * conj(target).
WavefrontMatchResult wavefront_match(const std::vector<ComplexField>& inputs,
                                     const std::vector<ComplexField>& targets,
                                     int max_iter = 50, double tol = 1e-6);

struct TransferMatrix {
  Eigen::Matrix2cd m;
  double mean_transmission = 0.0;   // mean port power per input
  double unitarity_deviation = 0.0;  // ||M^H M - eta I||
};

// M_ij = overlap of the propagated, masked input j with output mode i.
TransferMatrix realized_transfer_matrix(const PhaseMask& mask,
                                        const std::vector<ComplexField>& inputs,
                                        const std::vector<ComplexField>& outputs);

}  // namespace qemit
