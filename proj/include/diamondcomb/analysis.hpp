#pragma once

// Observables: cosine-squared fringe fits, visibility, fringe-shift
// differences, enhancement scans, and the tabular text they emit.
//
// Fit model: rho(Phi) = c1 + c2 cos^2(Phi + c3). Linearized exactly via
// cos^2 x = (1 + cos 2x)/2 to rho = a + b cos 2Phi + c sin 2Phi and solved
// by linear least squares; c1 = a - c2/2, c2 = 2 sqrt(b^2+c^2),
// c3 = atan2(-c, b)/2 normalized to [0, pi).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "diamondcomb/excitation.hpp"

namespace diamondcomb {

struct FringeFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;  // rad, in [0, pi)
  double residual_rms = 0.0;
};

inline FringeFit fit_fringe(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 4)
    throw std::invalid_argument("fringe fit needs at least 4 samples");
  double lo = samples.front().first, hi = samples.front().first;
  for (const auto& s : samples) {
    lo = std::min(lo, s.first);
    hi = std::max(hi, s.first);
  }
  if (hi - lo < M_PI - 1e-9)
    throw std::invalid_argument("fringe fit needs a Phi span of at least pi");

  // normal equations for [1, cos 2phi, sin 2phi]
  double ata[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double aty[3] = {0, 0, 0};
  for (const auto& [phi, y] : samples) {
    const double r[3] = {1.0, std::cos(2.0 * phi), std::sin(2.0 * phi)};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ata[i][j] += r[i] * r[j];
      aty[i] += r[i] * y;
    }
  }
  // 3x3 Gaussian elimination with partial pivoting
  double A[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) A[i][j] = ata[i][j];
    A[i][3] = aty[i];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) < 1e-12 * samples.size())
      throw std::invalid_argument("fringe fit design is rank deficient");
    std::swap(A[col], A[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      for (int j = col; j < 4; ++j) A[r][j] -= f * A[col][j];
    }
  }
  const double a = A[0][3] / A[0][0];
  const double b = A[1][3] / A[1][1];
  const double c = A[2][3] / A[2][2];

  FringeFit fit;
  fit.c2 = 2.0 * std::hypot(b, c);
  fit.c1 = a - 0.5 * fit.c2;
  fit.c3 = 0.5 * std::atan2(-c, b);
  fit.c3 -= M_PI * std::floor(fit.c3 / M_PI);  // into [0, pi)
  double ss = 0.0;
  for (const auto& [phi, y] : samples) {
    const double model = a + b * std::cos(2.0 * phi) + c * std::sin(2.0 * phi);
    ss += (y - model) * (y - model);
  }
  fit.residual_rms = std::sqrt(ss / samples.size());
  return fit;
}

inline double visibility(const FringeFit& fit) {
  if (fit.c1 == 0.0 && fit.c2 == 0.0)
    throw std::invalid_argument("visibility undefined: c1 = c2 = 0");
  return fit.c2 / (2.0 * fit.c1 + fit.c2);
}

// (c3_A - c3_B) wrapped to (-pi/2, pi/2], the natural range for a
// period-pi fringe.
inline double fringe_shift_difference(const FringeFit& a, const FringeFit& b) {
  double d = a.c3 - b.c3;
  while (d <= -0.5 * M_PI) d += M_PI;
  while (d > 0.5 * M_PI) d -= M_PI;
  return d;
}

// Population versus experiment-1 mask phase.
inline std::vector<std::pair<double, double>> fringe_scan(
    const ExcitationConfig& cfg, const std::vector<double>& phi_values) {
  if (phi_values.size() < 8)
    throw std::invalid_argument("fringe scan needs at least 8 phase values");
  {
    auto [lo, hi] = std::minmax_element(phi_values.begin(), phi_values.end());
    if (*hi - *lo < M_PI - 1e-9)
      throw std::invalid_argument("fringe scan must span at least pi");
  }
  std::vector<std::pair<double, double>> out(phi_values.size());
  detail::parallel_for_indexed(
      phi_values.size(), cfg.threads, [&](std::size_t i) {
        ExcitationConfig c = cfg;
        c.threads = 1;
        c.mask = experiment1_mask(phi_values[i], cfg.mask.pixel_width_hz,
                                  cfg.mask.pixel_offset_hz);
        const double p = (cfg.geometry.kind == GeometrySpec::Kind::standing)
                             ? standing_wave_population(c)
                             : population(c);
        out[i] = {phi_values[i], p};
      });
  return out;
}

struct EnhancementScan {
  // offsets rebased so 0 sits at the maximum ratio (paper convention)
  std::vector<std::pair<double, double>> points;
  double peak_offset_hz = 0.0;  // original (un-rebased) offset of the peak
  double peak_ratio = 0.0;
};

inline EnhancementScan enhancement_scan(const ExcitationConfig& cfg,
                                        const std::vector<double>& offsets_hz) {
  if (cfg.mode_policy != ModePolicy::full_sum)
    throw std::invalid_argument("enhancement scan requires the full-sum mode policy");
  if (offsets_hz.empty())
    throw std::invalid_argument("enhancement scan needs at least one offset");

  ExcitationConfig base = cfg;
  base.mask = PhaseMask{};  // uniform zero mask
  const double p0 = population(base);
  if (!(p0 > 0.0)) throw NumericalError("zero reference population in enhancement scan");

  std::vector<double> ratios(offsets_hz.size(), 0.0);
  detail::parallel_for_indexed(
      offsets_hz.size(), cfg.threads, [&](std::size_t i) {
        ExcitationConfig c = cfg;
        c.threads = 1;
        c.mask = translate_mask(cfg.mask, offsets_hz[i]);
        ratios[i] = population(c) / p0;
      });

  EnhancementScan scan;
  std::size_t imax = 0;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (ratios[i] > ratios[imax]) imax = i;
  scan.peak_offset_hz = offsets_hz[imax];
  scan.peak_ratio = ratios[imax];
  scan.points.resize(offsets_hz.size());
  for (std::size_t i = 0; i < offsets_hz.size(); ++i)
    scan.points[i] = {offsets_hz[i] - offsets_hz[imax], ratios[i]};
  return scan;
}

// ---- tabular text output ---------------------------------------------------
// Comma-separated, header row, 12 significant digits, LF-terminated lines.

inline std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_fringe_csv(std::ostream& os,
                             const std::vector<std::pair<double, double>>& scan,
                             const FringeFit& fit) {
  os << "phi_rad,population\n";
  for (const auto& [phi, p] : scan)
    os << format_sig12(phi) << "," << format_sig12(p) << "\n";
  os << "c1,c2,c3_rad,visibility,residual_rms\n";
  os << format_sig12(fit.c1) << "," << format_sig12(fit.c2) << ","
     << format_sig12(fit.c3) << "," << format_sig12(visibility(fit)) << ","
     << format_sig12(fit.residual_rms) << "\n";
}

inline void write_enhancement_csv(std::ostream& os, const EnhancementScan& s) {
  os << "offset_Hz,ratio\n";
  for (const auto& [off, r] : s.points)
    os << format_sig12(off) << "," << format_sig12(r) << "\n";
  os << "peak_offset_Hz,peak_ratio\n";
  os << format_sig12(s.peak_offset_hz) << "," << format_sig12(s.peak_ratio)
     << "\n";
}

inline void write_scan_csv(std::ostream& os, const std::string& param_name,
                           const std::vector<std::pair<double, double>>& pts) {
  os << param_name << ",population\n";
  for (const auto& [x, p] : pts)
    os << format_sig12(x) << "," << format_sig12(p) << "\n";
}

}  // namespace diamondcomb
