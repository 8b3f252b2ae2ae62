#pragma once

// Unit conventions used throughout: time in ns, rates in ns^-1,
// transition energies in ueV, angular frequencies in rad/ns,
// transverse lengths in um, focal lengths in mm.

namespace qemit {

// hbar in ueV * ns
inline constexpr double kHbarUevNs = 0.6582119569;

// Energy splitting (ueV) -> angular detuning (rad/ns).
inline double energy_to_detuning(double hbar_delta_uev) {
  return hbar_delta_uev / kHbarUevNs;
}

inline double detuning_to_energy(double delta_rad_ns) {
  return delta_rad_ns * kHbarUevNs;
}

}  // namespace qemit
