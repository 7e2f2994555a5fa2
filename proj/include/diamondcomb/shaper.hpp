#pragma once

// Piecewise-constant spectral phase mask (the 2f-2f pulse shaper / SLM),
// with optional pixel quantization and translation. Masks live in optical
// frequency; wavelength-specified constructors convert once via nu = c/lambda.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "diamondcomb/atom.hpp"
#include "diamondcomb/constants.hpp"
#include "diamondcomb/errors.hpp"

namespace diamondcomb {

struct PhaseMask {
  // phases[i] applies on [breakpoints[i-1], breakpoints[i]) -- right-continuous
  // at each breakpoint. phases has exactly breakpoints.size()+1 entries.
  std::vector<double> breakpoints_hz;
  std::vector<double> phases_rad{0.0};
  double pixel_width_hz = 0.0;   // 0 = ideal (no pixelation)
  double pixel_offset_hz = 0.0;  // sub-pixel translation of the pixel grid

  void check() const {
    if (phases_rad.size() != breakpoints_hz.size() + 1)
      throw ConfigError("mask: phases must have one more entry than breakpoints");
    for (std::size_t i = 1; i < breakpoints_hz.size(); ++i)
      if (!(breakpoints_hz[i - 1] < breakpoints_hz[i]))
        throw ConfigError("mask: breakpoints must be strictly increasing");
    for (double p : phases_rad)
      if (!std::isfinite(p)) throw ConfigError("mask: non-finite phase");
    if (pixel_width_hz < 0.0) throw ConfigError("mask: negative pixel width");
  }
};

namespace detail {

inline double ideal_phase_at(const PhaseMask& m, double nu_hz) {
  auto it = std::upper_bound(m.breakpoints_hz.begin(), m.breakpoints_hz.end(),
                             nu_hz);
  return m.phases_rad[static_cast<std::size_t>(it - m.breakpoints_hz.begin())];
}

}  // namespace detail

inline double mask_phase_at(const PhaseMask& m, double nu_hz) {
  if (!(nu_hz > 0.0)) throw std::invalid_argument("frequency must be positive");
  if (m.pixel_width_hz == 0.0) return detail::ideal_phase_at(m, nu_hz);
  // Each mode inherits the ideal phase at the center of its pixel.
  const double p = std::floor((nu_hz - m.pixel_offset_hz) / m.pixel_width_hz);
  const double center = m.pixel_offset_hz + (p + 0.5) * m.pixel_width_hz;
  return detail::ideal_phase_at(m, center);
}

// Experiment-1 mask: phase phi on the 772..784 nm window, 0 elsewhere.
inline PhaseMask experiment1_mask(double phi_rad, double pixel_width_hz = 0.0,
                                  double pixel_offset_hz = 0.0) {
  PhaseMask m;
  m.breakpoints_hz = {wavelength_to_frequency(784e-9),
                      wavelength_to_frequency(772e-9)};
  m.phases_rad = {0.0, phi_rad, 0.0};
  m.pixel_width_hz = pixel_width_hz;
  m.pixel_offset_hz = pixel_offset_hz;
  m.check();
  return m;
}

// Experiment-2 mask: pi on [edge, edge+width) above each of the two
// intermediate-resonance edges in frequency (just below 776 nm / 762 nm in
// wavelength). Zero-width bands reduce to the identity mask.
inline PhaseMask experiment2_mask(double edge_a_hz, double edge_b_hz,
                                  double width_a_hz, double width_b_hz,
                                  double pixel_width_hz = 0.0,
                                  double pixel_offset_hz = 0.0) {
  if (width_a_hz < 0.0 || width_b_hz < 0.0)
    throw ConfigError("experiment2 mask: negative band width");
  struct Band { double lo, hi; };
  std::vector<Band> bands;
  if (width_a_hz > 0.0) bands.push_back({edge_a_hz, edge_a_hz + width_a_hz});
  if (width_b_hz > 0.0) bands.push_back({edge_b_hz, edge_b_hz + width_b_hz});
  std::sort(bands.begin(), bands.end(),
            [](const Band& x, const Band& y) { return x.lo < y.lo; });
  if (bands.size() == 2 && bands[1].lo < bands[0].hi)
    throw ConfigError("experiment2 mask: overlapping bands");
  PhaseMask m;
  for (const auto& b : bands) {
    m.breakpoints_hz.push_back(b.lo);
    m.breakpoints_hz.push_back(b.hi);
    m.phases_rad.back() = 0.0;
    m.phases_rad.push_back(M_PI);
    m.phases_rad.push_back(0.0);
  }
  m.pixel_width_hz = pixel_width_hz;
  m.pixel_offset_hz = pixel_offset_hz;
  m.check();
  return m;
}

// Default experiment-2 construction for a loaded atom: one band per
// fine-structure branch of the intermediates, starting `edge_margin_hz`
// above the branch's highest intermediate-to-final resonance so that no
// resonant pair is flipped, only the off-resonant pairs detuned below.
inline PhaseMask default_enhancement_mask(const AtomSystem& atom,
                                          const std::string& ground_label,
                                          const std::string& final_label,
                                          double edge_margin_hz = 3.5e9,
                                          double width_a_hz = 0.5e12,
                                          double width_b_hz = 6.0e12,
                                          double pixel_width_hz = 0.0,
                                          double pixel_offset_hz = 0.0) {
  const auto& g = atom.level(ground_label);
  const auto& f = atom.level(final_label);
  // Branch edge = max final-leg frequency among dipole-connected intermediates
  // of that term. Band a sits on the lower-frequency branch.
  std::map<std::string, double> branch_edge;
  for (const auto& lv : atom.levels()) {
    if (lv.term() == g.term() || lv.term() == f.term()) continue;
    if (atom.reduced_dipole(g, lv) == 0.0 || atom.reduced_dipole(lv, f) == 0.0)
      continue;
    const double nu_if = f.energy_hz - lv.energy_hz;
    auto it = branch_edge.find(lv.term());
    if (it == branch_edge.end() || nu_if > it->second)
      branch_edge[lv.term()] = nu_if;
  }
  if (branch_edge.size() != 2)
    throw PhysicsError("default enhancement mask needs exactly two intermediate branches, found " +
                       std::to_string(branch_edge.size()));
  std::vector<double> edges;
  for (const auto& [term, e] : branch_edge) edges.push_back(e);
  std::sort(edges.begin(), edges.end());
  return experiment2_mask(edges[0] + edge_margin_hz, edges[1] + edge_margin_hz,
                          width_a_hz, width_b_hz, pixel_width_hz,
                          pixel_offset_hz);
}

inline PhaseMask translate_mask(const PhaseMask& m, double delta_hz) {
  PhaseMask out = m;
  for (double& b : out.breakpoints_hz) b += delta_hz;
  out.pixel_offset_hz += delta_hz;
  return out;
}

}  // namespace diamondcomb
