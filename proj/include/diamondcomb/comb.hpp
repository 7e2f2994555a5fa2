#pragma once

// Discrete optical frequency comb: nu_N = f_o + N * f_r with a Gaussian
// spectral envelope. f_r and f_o are held internally as exact integer
// microhertz so that mode spacing and two-photon pair sums close exactly;
// doubles appear only at the Hz-valued API boundary.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "diamondcomb/constants.hpp"
#include "diamondcomb/errors.hpp"

namespace diamondcomb {

struct SpectralEnvelope {
  double center_m = 778e-9;   // center wavelength
  double fwhm_m = 55e-9;      // intensity-FWHM bandwidth, in wavelength
  double peak_field = 1.0;    // field amplitude at center, arbitrary units
};

inline double envelope_center_hz(const SpectralEnvelope& e) {
  return kSpeedOfLight / e.center_m;
}

// Frequency-domain intensity FWHM from the wavelength band edges.
inline double envelope_fwhm_hz(const SpectralEnvelope& e) {
  return kSpeedOfLight / (e.center_m - 0.5 * e.fwhm_m) -
         kSpeedOfLight / (e.center_m + 0.5 * e.fwhm_m);
}

inline double envelope_field(const SpectralEnvelope& e, double nu_hz) {
  const double x = nu_hz - envelope_center_hz(e);
  const double w = envelope_fwhm_hz(e);
  return e.peak_field * std::exp(-2.0 * M_LN2 * x * x / (w * w));
}

class CombSpec {
 public:
  // Mode range chosen where the envelope field falls to `truncation` of peak.
  static CombSpec make(double f_r_hz, double f_o_hz, SpectralEnvelope env,
                       double truncation = 1e-4) {
    if (!(truncation > 0.0) || truncation >= 1.0)
      throw ConfigError("comb truncation must be in (0,1)");
    const double half =
        envelope_fwhm_hz(env) * std::sqrt(std::log(1.0 / truncation) / (2.0 * M_LN2));
    const double c = envelope_center_hz(env);
    auto n_min = static_cast<std::int64_t>(std::ceil((c - half - f_o_hz) / f_r_hz));
    auto n_max = static_cast<std::int64_t>(std::floor((c + half - f_o_hz) / f_r_hz));
    return make_range(f_r_hz, f_o_hz, n_min, n_max, env);
  }

  static CombSpec make_range(double f_r_hz, double f_o_hz, std::int64_t n_min,
                             std::int64_t n_max, SpectralEnvelope env) {
    CombSpec cs;
    cs.f_r_uhz_ = std::llround(f_r_hz * 1e6);
    cs.f_o_uhz_ = std::llround(f_o_hz * 1e6);
    cs.n_min_ = n_min;
    cs.n_max_ = n_max;
    cs.envelope_ = env;
    if (cs.f_r_uhz_ <= 0) throw ConfigError("comb: f_r must be positive");
    if (cs.f_o_uhz_ < 0 || cs.f_o_uhz_ >= cs.f_r_uhz_)
      throw ConfigError("comb: f_o must satisfy 0 <= f_o < f_r");
    if (!(n_min < n_max)) throw ConfigError("comb: need n_min < n_max");
    if (cs.mode_frequency_uhz(n_min) <= 0)
      throw ConfigError("comb: mode frequencies must be positive");
    if (!(env.center_m > 0.0) || !(env.fwhm_m > 0.0) || !(env.peak_field >= 0.0))
      throw ConfigError("comb: bad spectral envelope");
    return cs;
  }

  double f_r_hz() const { return 1e-6 * static_cast<double>(f_r_uhz_); }
  double f_o_hz() const { return 1e-6 * static_cast<double>(f_o_uhz_); }
  std::int64_t f_r_uhz() const { return f_r_uhz_; }
  std::int64_t f_o_uhz() const { return f_o_uhz_; }
  std::int64_t n_min() const { return n_min_; }
  std::int64_t n_max() const { return n_max_; }
  const SpectralEnvelope& envelope() const { return envelope_; }

  bool in_range(std::int64_t N) const { return N >= n_min_ && N <= n_max_; }

  // Exact microhertz value of nu_N (no rounding at all).
  __int128 mode_frequency_uhz(std::int64_t N) const {
    return static_cast<__int128>(f_o_uhz_) +
           static_cast<__int128>(N) * static_cast<__int128>(f_r_uhz_);
  }

  double mode_frequency(std::int64_t N) const {
    if (!in_range(N))
      throw std::out_of_range("mode index outside comb range");
    return 1e-6 * static_cast<double>(mode_frequency_uhz(N));
  }

  // Exact pair-sum frequency K*f_r + 2*f_o in microhertz.
  __int128 pair_sum_uhz(std::int64_t K) const {
    return static_cast<__int128>(K) * static_cast<__int128>(f_r_uhz_) +
           2 * static_cast<__int128>(f_o_uhz_);
  }

  double pair_sum_hz(std::int64_t K) const {
    return 1e-6 * static_cast<double>(pair_sum_uhz(K));
  }

  // Index of the mode nearest nu; exact half-spacing ties go to the lower N.
  std::int64_t mode_index_near(double nu_hz) const {
    if (nu_hz < mode_frequency(n_min_) || nu_hz > mode_frequency(n_max_))
      throw std::out_of_range("frequency outside comb range");
    const double x = (nu_hz - f_o_hz()) / f_r_hz();
    auto k = static_cast<std::int64_t>(std::floor(x));
    const double frac = x - static_cast<double>(k);
    std::int64_t n = (frac > 0.5) ? k + 1 : k;
    if (n < n_min_) n = n_min_;
    if (n > n_max_) n = n_max_;
    return n;
  }

  // All unordered in-range pairs n <= m with n + m = K, ascending n.
  std::vector<std::pair<std::int64_t, std::int64_t>> two_photon_pairs(
      std::int64_t K) const {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    std::int64_t lo = std::max(n_min_, K - n_max_);
    std::int64_t hi = std::min(K - n_min_, K / 2);
    if (2 * hi > K) --hi;  // enforce n <= m for negative K edge cases
    for (std::int64_t n = lo; n <= hi; ++n) out.emplace_back(n, K - n);
    return out;
  }

 private:
  std::int64_t f_r_uhz_ = 0;
  std::int64_t f_o_uhz_ = 0;
  std::int64_t n_min_ = 0;
  std::int64_t n_max_ = 0;
  SpectralEnvelope envelope_;
};

inline double envelope_field(const CombSpec& comb, double nu_hz) {
  if (!(nu_hz > 0.0)) throw std::invalid_argument("frequency must be positive");
  return envelope_field(comb.envelope(), nu_hz);
}

}  // namespace diamondcomb
