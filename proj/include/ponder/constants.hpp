#pragma once

namespace ponder {

// CODATA 2018 values.
inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kBoltzmann = 1.380649e-23;         // J/K
inline constexpr double kPi = 3.14159265358979323846;

/// Photon energy at vacuum wavelength `wavelength` (J).
inline double photon_energy(double wavelength) {
  return kHbar * 2.0 * kPi * kSpeedOfLight / wavelength;
}

}  // namespace ponder
