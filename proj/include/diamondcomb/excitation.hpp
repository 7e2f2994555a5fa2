#pragma once

// Second-order two-photon excitation amplitudes for a comb-driven diamond
// system: per-pair amplitudes, the summed amplitude over mode pairs and
// intermediate states, and populations for traveling-wave and multi-mode
// standing-wave geometries.
//
// One term of the sum, for modes (n, m) via intermediate i:
//
//   c = E_n E_m mu_gi mu_if
//       / (i(w_gf - (m+n) 2 pi f_r - 4 pi f_o) + pi gamma_f)
//       * [ 1/(i(w_gi - 2 pi(n f_r + f_o)) + pi gamma_i)
//         + 1/(i(w_gi - 2 pi(m f_r + f_o)) + pi gamma_i) ]
//
// evaluated with masked complex fields E exp(i phi(nu)). gamma is the
// natural FWHM in Hz. The overall proportionality constant is fixed to 1;
// amplitudes and populations are in arbitrary units.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "diamondcomb/atom.hpp"
#include "diamondcomb/comb.hpp"
#include "diamondcomb/errors.hpp"
#include "diamondcomb/shaper.hpp"

namespace diamondcomb {

enum class ModePolicy { resonant_only, full_sum };

struct GeometrySpec {
  enum class Kind { traveling, standing };
  Kind kind = Kind::traveling;
  double cloud_length_m = 1.4187e-4;  // one beat period of the D2-leg pair
  int samples = 256;
  double theta_rad = 0.0;  // common counter-propagating phase offset
};

struct ExcitationConfig {
  CombSpec comb;
  PhaseMask mask;
  AtomSystem atom;
  std::string ground_level;
  std::string final_level;
  double intermediate_window_hz = 2.0e7;
  int polarization_q = 0;
  GeometrySpec geometry;
  ModePolicy mode_policy = ModePolicy::resonant_only;
  double two_photon_window_gamma_f = 1.0e3;
  int threads = 1;
};

struct PathAmplitude {
  std::int64_t n = 0, m = 0;
  Sublevel ground, intermediate, final_state;
  std::complex<double> value{0.0, 0.0};
  double intermediate_detuning_hz = 0.0;  // nearest-leg mode minus resonance
};

namespace detail {

inline std::complex<double> lorentzian_term(double gamma_hz, double detuning_hz) {
  // 1 / (pi gamma - 2 pi i delta); delta = nu_mode - nu_transition.
  const std::complex<double> den(M_PI * gamma_hz, -2.0 * M_PI * detuning_hz);
  if (den == std::complex<double>(0.0, 0.0))
    throw NumericalError(
        "zero Lorentzian denominator: a comb mode sits exactly on a "
        "resonance with gamma_i = 0; set gamma_i > 0");
  return 1.0 / den;
}

// Deterministic fixed-assignment parallel map: item i is computed by worker
// i % nthreads and stored in slot i, so results are independent of timing.
template <typename Fn>
inline void parallel_for_indexed(std::size_t count, int nthreads, Fn&& fn) {
  if (nthreads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min<std::size_t>(nthreads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < count;
           i += static_cast<std::size_t>(workers))
        fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

// Intermediate levels that are dipole-connected to both legs of the diamond
// and have a comb mode within `intermediate_window_hz` of their lower-leg
// resonance. Returned in data-file order (summation-order contract).
inline std::vector<HyperfineLevel> select_intermediates(
    const ExcitationConfig& cfg) {
  const auto& g = cfg.atom.level(cfg.ground_level);
  const auto& f = cfg.atom.level(cfg.final_level);
  std::vector<HyperfineLevel> out;
  for (const auto& lv : cfg.atom.levels()) {
    if (lv.label == g.label || lv.label == f.label) continue;
    if (cfg.atom.reduced_dipole(g, lv) == 0.0 ||
        cfg.atom.reduced_dipole(lv, f) == 0.0)
      continue;
    const double nu_gi = lv.energy_hz - g.energy_hz;
    if (nu_gi <= 0.0) continue;
    double detune;
    try {
      const std::int64_t n = cfg.comb.mode_index_near(nu_gi);
      detune = cfg.comb.mode_frequency(n) - nu_gi;
    } catch (const std::out_of_range&) {
      continue;  // resonance outside the comb span
    }
    if (std::fabs(detune) <= cfg.intermediate_window_hz) out.push_back(lv);
  }
  if (out.empty())
    throw PhysicsError("no intermediate level within " +
                       std::to_string(cfg.intermediate_window_hz) +
                       " Hz of a comb mode");
  return out;
}

// Complex amplitude of a single (mode pair) x (intermediate) pathway.
inline std::complex<double> pair_amplitude(const ExcitationConfig& cfg,
                                           std::int64_t n, std::int64_t m,
                                           const Sublevel& ground,
                                           const Sublevel& intermediate,
                                           const Sublevel& final_state) {
  const double nu_n = cfg.comb.mode_frequency(n);
  const double nu_m = cfg.comb.mode_frequency(m);

  const double a1 =
      angular_dipole_factor(ground, intermediate, cfg.polarization_q);
  const double a2 =
      angular_dipole_factor(intermediate, final_state, cfg.polarization_q);
  const double mu_gi =
      a1 * cfg.atom.reduced_dipole(ground.level, intermediate.level);
  const double mu_if =
      a2 * cfg.atom.reduced_dipole(intermediate.level, final_state.level);
  if (mu_gi == 0.0 || mu_if == 0.0) return {0.0, 0.0};

  const double nu_gi = intermediate.level.energy_hz - ground.level.energy_hz;
  const double nu_gf = final_state.level.energy_hz - ground.level.energy_hz;
  const double gamma_i = intermediate.level.linewidth_hz;
  const double gamma_f = final_state.level.linewidth_hz;

  const std::complex<double> bracket =
      detail::lorentzian_term(gamma_i, nu_n - nu_gi) +
      detail::lorentzian_term(gamma_i, nu_m - nu_gi);
  const double two_photon_detuning =
      1e-6 * static_cast<double>(cfg.comb.pair_sum_uhz(n + m)) - nu_gf;
  const std::complex<double> fin =
      detail::lorentzian_term(gamma_f, two_photon_detuning);

  const double phi = mask_phase_at(cfg.mask, nu_n) + mask_phase_at(cfg.mask, nu_m);
  std::complex<double> fields =
      envelope_field(cfg.comb, nu_n) * envelope_field(cfg.comb, nu_m) *
      std::complex<double>(std::cos(phi), std::sin(phi));
  return mu_gi * mu_if * fields * fin * bracket;
}

namespace detail {

// Spatial field multiplier; identity for traveling wave. For the standing
// wave the per-mode field is 2 E cos(2 pi nu z / c + theta/2); the cosine is
// kept signed (its sign is the pi phase of the standing-wave field).
using SpatialFn = std::function<double(double nu_hz)>;

struct ChainWeights {
  // per selected intermediate: product of signed dipole factors for the
  // ground -> intermediate -> final sublevel chain
  std::vector<double> d;
};

inline std::complex<double> total_amplitude_impl(
    const ExcitationConfig& cfg, const Sublevel& ground,
    const Sublevel& final_state,
    const std::vector<HyperfineLevel>& intermediates,
    const SpatialFn* spatial) {
  const auto& g = ground.level;
  const auto& f = final_state.level;
  const double nu_gf = f.energy_hz - g.energy_hz;
  const double gamma_f = f.linewidth_hz;
  const int q = cfg.polarization_q;

  // chain dipole weights and lower-leg resonances per intermediate
  const std::size_t ni = intermediates.size();
  std::vector<double> weight(ni), nu_gi(ni), gam(ni);
  for (std::size_t k = 0; k < ni; ++k) {
    const auto& lv = intermediates[k];
    Sublevel mid{lv, ground.two_mF + 2 * q};
    double w = 0.0;
    if (std::abs(mid.two_mF) <= lv.two_F) {
      w = angular_dipole_factor(ground, mid, q) *
          cfg.atom.reduced_dipole(g, lv) *
          angular_dipole_factor(mid, final_state, q) *
          cfg.atom.reduced_dipole(lv, f);
    }
    weight[k] = w;
    nu_gi[k] = lv.energy_hz - g.energy_hz;
    gam[k] = lv.linewidth_hz;
  }

  const double f_r = cfg.comb.f_r_hz();
  const double f_o = cfg.comb.f_o_hz();

  if (cfg.mode_policy == ModePolicy::resonant_only) {
    const auto K = static_cast<std::int64_t>(
        std::llround((nu_gf - 2.0 * f_o) / f_r));
    std::complex<double> total{0.0, 0.0};
    for (std::size_t k = 0; k < ni; ++k) {
      if (weight[k] == 0.0) continue;
      const std::int64_t n = cfg.comb.mode_index_near(nu_gi[k]);
      const std::int64_t m = K - n;
      if (!cfg.comb.in_range(m))
        throw PhysicsError("resonant pair for " + intermediates[k].label +
                           " has no two-photon partner in the comb range");
      const std::int64_t lo = std::min(n, m), hi = std::max(n, m);
      const double nu_lo = cfg.comb.mode_frequency(lo);
      const double nu_hi = cfg.comb.mode_frequency(hi);
      const std::complex<double> bracket =
          lorentzian_term(gam[k], nu_lo - nu_gi[k]) +
          lorentzian_term(gam[k], nu_hi - nu_gi[k]);
      const double d2 =
          1e-6 * static_cast<double>(cfg.comb.pair_sum_uhz(K)) - nu_gf;
      const double phi =
          mask_phase_at(cfg.mask, nu_lo) + mask_phase_at(cfg.mask, nu_hi);
      double fields = envelope_field(cfg.comb, nu_lo) *
                      envelope_field(cfg.comb, nu_hi);
      if (spatial) fields *= (*spatial)(nu_lo) * (*spatial)(nu_hi);
      total += weight[k] * fields *
               std::complex<double>(std::cos(phi), std::sin(phi)) *
               lorentzian_term(gamma_f, d2) * bracket;
    }
    return total;
  }

  // Full sum: every pair of every K whose two-photon detuning lies within
  // two_photon_window_gamma_f * gamma_f. K partial sums are accumulated in
  // slots and reduced in ascending-K order so results do not depend on the
  // worker count.
  const double window = cfg.two_photon_window_gamma_f * gamma_f;
  const auto K0 = static_cast<std::int64_t>(
      std::llround((nu_gf - 2.0 * f_o) / f_r));
  std::vector<std::int64_t> Ks;
  for (std::int64_t K = K0;; --K) {
    if (std::fabs(cfg.comb.pair_sum_hz(K) - nu_gf) > window) break;
    if (K < 2 * cfg.comb.n_min()) break;
    Ks.push_back(K);
  }
  std::reverse(Ks.begin(), Ks.end());
  for (std::int64_t K = K0 + 1;; ++K) {
    if (std::fabs(cfg.comb.pair_sum_hz(K) - nu_gf) > window) break;
    if (K > 2 * cfg.comb.n_max()) break;
    Ks.push_back(K);
  }

  std::vector<std::complex<double>> partial(Ks.size(), {0.0, 0.0});
  detail::parallel_for_indexed(Ks.size(), cfg.threads, [&](std::size_t idx) {
    const std::int64_t K = Ks[idx];
    const double d2 = 1e-6 * static_cast<double>(cfg.comb.pair_sum_uhz(K)) - nu_gf;
    const std::complex<double> fin = lorentzian_term(gamma_f, d2);
    std::complex<double> acc{0.0, 0.0};
    const std::int64_t lo = std::max(cfg.comb.n_min(), K - cfg.comb.n_max());
    std::int64_t hi = std::min(K - cfg.comb.n_min(), K / 2);
    if (2 * hi > K) --hi;
    for (std::int64_t n = lo; n <= hi; ++n) {
      const std::int64_t m = K - n;
      const double nu_n = cfg.comb.mode_frequency(n);
      const double nu_m = cfg.comb.mode_frequency(m);
      double fields = envelope_field(cfg.comb, nu_n) *
                      envelope_field(cfg.comb, nu_m);
      if (spatial) fields *= (*spatial)(nu_n) * (*spatial)(nu_m);
      if (fields == 0.0) continue;
      const double phi =
          mask_phase_at(cfg.mask, nu_n) + mask_phase_at(cfg.mask, nu_m);
      std::complex<double> sum_i{0.0, 0.0};
      for (std::size_t k = 0; k < ni; ++k) {
        if (weight[k] == 0.0) continue;
        sum_i += weight[k] * (lorentzian_term(gam[k], nu_n - nu_gi[k]) +
                              lorentzian_term(gam[k], nu_m - nu_gi[k]));
      }
      acc += fields * std::complex<double>(std::cos(phi), std::sin(phi)) * sum_i;
    }
    partial[idx] = acc * fin;
  });

  std::complex<double> total{0.0, 0.0};
  for (const auto& p : partial) total += p;
  return total;
}

inline double population_impl(const ExcitationConfig& cfg,
                              const SpatialFn* spatial, int threads_for_K) {
  const auto& g = cfg.atom.level(cfg.ground_level);
  const auto& f = cfg.atom.level(cfg.final_level);
  if (f.energy_hz <= g.energy_hz)
    throw PhysicsError("final level must lie above the ground level");
  const auto intermediates = select_intermediates(cfg);

  ExcitationConfig c = cfg;
  c.threads = threads_for_K;
  const int q = cfg.polarization_q;
  double acc = 0.0;
  for (int two_mg = -g.two_F; two_mg <= g.two_F; two_mg += 2) {
    const int two_mf = two_mg + 4 * q;  // two photons of polarization q
    if (std::abs(two_mf) > f.two_F) continue;
    const std::complex<double> amp = detail::total_amplitude_impl(
        c, Sublevel{g, two_mg}, Sublevel{f, two_mf}, intermediates, spatial);
    acc += std::norm(amp);
  }
  return acc / static_cast<double>(g.two_F + 1);
}

}  // namespace detail

// Sum of pair_amplitude over intermediates and mode pairs per the configured
// policy, for one ground/final sublevel chain.
inline std::complex<double> total_amplitude(const ExcitationConfig& cfg,
                                            const Sublevel& ground,
                                            const Sublevel& final_state) {
  const auto intermediates = select_intermediates(cfg);
  return detail::total_amplitude_impl(cfg, ground, final_state, intermediates,
                                      nullptr);
}

// Incoherent equal-weight average over ground mF of |total_amplitude|^2,
// summed over reachable final sublevels. Arbitrary units.
inline double population(const ExcitationConfig& cfg) {
  return detail::population_impl(cfg, nullptr, cfg.threads);
}

// Spatial average of population(z) over the atom cloud for counter-propagating
// excitation; each mode's field at z is scaled by 2 cos(2 pi nu z/c + theta/2).
inline double standing_wave_population(const ExcitationConfig& cfg) {
  if (cfg.geometry.kind != GeometrySpec::Kind::standing)
    throw std::invalid_argument("standing_wave_population requires standing-wave geometry");
  if (cfg.geometry.samples < 1)
    throw std::invalid_argument("standing-wave sampling needs samples >= 1");
  const int ns = cfg.geometry.samples;
  const double L = cfg.geometry.cloud_length_m;
  const double theta = cfg.geometry.theta_rad;

  std::vector<double> pops(static_cast<std::size_t>(ns), 0.0);
  detail::parallel_for_indexed(
      static_cast<std::size_t>(ns), cfg.threads, [&](std::size_t i) {
        const double z =
            (static_cast<double>(i) + 0.5) * L / static_cast<double>(ns);
        detail::SpatialFn spatial = [z, theta](double nu_hz) {
          return 2.0 *
                 std::cos(2.0 * M_PI * nu_hz * z / kSpeedOfLight + 0.5 * theta);
        };
        pops[i] = detail::population_impl(cfg, &spatial, 1);
      });
  double acc = 0.0;
  for (double p : pops) acc += p;
  return acc / static_cast<double>(ns);
}

}  // namespace diamondcomb
