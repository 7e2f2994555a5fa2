#pragma once

namespace diamondcomb {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

inline double wavelength_to_frequency(double lambda_m) {
  return kSpeedOfLight / lambda_m;
}

inline double frequency_to_wavelength(double nu_hz) {
  return kSpeedOfLight / nu_hz;
}

}  // namespace diamondcomb
