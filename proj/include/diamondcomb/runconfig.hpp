#pragma once

// Run-configuration document: one JSON file per run, unit suffixes in key
// names, no positional physics parameters on the command line.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diamondcomb/analysis.hpp"
#include "diamondcomb/excitation.hpp"

namespace diamondcomb {

struct FringeParams {
  int phi_points = 32;
  double phi_span_rad = 2.0 * M_PI;
};

struct EnhanceParams {
  double offset_from_hz = -5.0e11;
  double offset_to_hz = 5.0e11;
  int offset_points = 41;
};

struct ScanMaskParams {
  std::string parameter;  // "phi" | "mask_offset" | "width_a" | "width_b"
  double from = 0.0;
  double to = 0.0;
  int points = 0;
};

struct PathsParams {
  int representative_two_mF = 2;  // mF = +1 chain by default
};

struct MaskSettings {
  std::string type = "none";  // none | experiment1 | experiment2 | segments
  double phi_rad = 0.0;
  double edge_margin_hz = 3.5e9;
  double width_a_hz = 0.5e12;
  double width_b_hz = 6.0e12;
  std::optional<double> edge_a_hz, edge_b_hz;  // explicit override
  struct Segment {
    double from_hz, to_hz, phase_rad;
  };
  std::vector<Segment> segments;
  double pixel_width_hz = 0.0;
  double pixel_offset_hz = 0.0;
};

struct RunConfig {
  nlohmann::json echo;  // the raw parsed document, for manifests
  std::string atom_data_path;
  double f_r_hz = 0.0, f_o_hz = 0.0;
  SpectralEnvelope envelope;
  double truncation = 1e-4;
  std::string ground_level, final_level;
  double intermediate_window_hz = 2.0e7;
  int polarization_q = 0;
  GeometrySpec geometry;
  std::string mode_policy = "resonant-only";
  double two_photon_window_gamma_f = 1.0e3;
  MaskSettings mask;
  std::optional<FringeParams> fringe;
  std::optional<EnhanceParams> enhance;
  std::optional<ScanMaskParams> scan_mask;
  PathsParams paths;
  std::string output_path;

  AtomSystem load_atom() const { return load_atom_system_file(atom_data_path); }

  PhaseMask build_mask(const AtomSystem& atom) const {
    if (mask.type == "none") {
      PhaseMask m;
      m.pixel_width_hz = mask.pixel_width_hz;
      m.pixel_offset_hz = mask.pixel_offset_hz;
      return m;
    }
    if (mask.type == "experiment1")
      return experiment1_mask(mask.phi_rad, mask.pixel_width_hz,
                              mask.pixel_offset_hz);
    if (mask.type == "experiment2") {
      if (mask.edge_a_hz && mask.edge_b_hz)
        return experiment2_mask(*mask.edge_a_hz, *mask.edge_b_hz,
                                mask.width_a_hz, mask.width_b_hz,
                                mask.pixel_width_hz, mask.pixel_offset_hz);
      return default_enhancement_mask(atom, ground_level, final_level,
                                      mask.edge_margin_hz, mask.width_a_hz,
                                      mask.width_b_hz, mask.pixel_width_hz,
                                      mask.pixel_offset_hz);
    }
    if (mask.type == "segments") {
      PhaseMask m;
      double prev = -1.0;
      for (const auto& s : mask.segments) {
        if (!(s.from_hz < s.to_hz) || s.from_hz <= prev)
          throw ConfigError("mask segments must be disjoint and ascending");
        m.breakpoints_hz.push_back(s.from_hz);
        m.breakpoints_hz.push_back(s.to_hz);
        m.phases_rad.back() = 0.0;
        m.phases_rad.push_back(s.phase_rad);
        m.phases_rad.push_back(0.0);
        prev = s.to_hz;
      }
      m.pixel_width_hz = mask.pixel_width_hz;
      m.pixel_offset_hz = mask.pixel_offset_hz;
      m.check();
      return m;
    }
    throw ConfigError("unknown mask type: " + mask.type);
  }

  ExcitationConfig build_excitation(const AtomSystem& atom, int threads) const {
    ExcitationConfig cfg;
    cfg.comb = CombSpec::make(f_r_hz, f_o_hz, envelope, truncation);
    cfg.atom = atom;
    cfg.mask = build_mask(atom);
    cfg.ground_level = ground_level;
    cfg.final_level = final_level;
    cfg.intermediate_window_hz = intermediate_window_hz;
    cfg.polarization_q = polarization_q;
    cfg.geometry = geometry;
    cfg.mode_policy = (mode_policy == "full-sum") ? ModePolicy::full_sum
                                                  : ModePolicy::resonant_only;
    cfg.two_photon_window_gamma_f = two_photon_window_gamma_f;
    cfg.threads = threads;
    if (!atom.has_level(ground_level))
      throw ConfigError("config names unknown ground level " + ground_level);
    if (!atom.has_level(final_level))
      throw ConfigError("config names unknown final level " + final_level);
    return cfg;
  }
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

inline double need_num(const nlohmann::json& j, const char* key,
                       const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ConfigError("config: missing numeric field '" + std::string(key) +
                      "' in " + ctx);
  return j.at(key).get<double>();
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir) {
  using detail::get_or;
  using detail::need_num;
  RunConfig rc;
  rc.echo = doc;

  if (!doc.contains("atom_data_path"))
    throw ConfigError("config: missing atom_data_path");
  std::filesystem::path p = doc.at("atom_data_path").get<std::string>();
  rc.atom_data_path = p.is_absolute() ? p.string() : (base_dir / p).string();

  if (!doc.contains("comb")) throw ConfigError("config: missing comb section");
  const auto& jc = doc.at("comb");
  rc.f_r_hz = need_num(jc, "f_r_Hz", "comb");
  rc.f_o_hz = need_num(jc, "f_o_Hz", "comb");
  rc.envelope.center_m = need_num(jc, "center_nm", "comb") * 1e-9;
  rc.envelope.fwhm_m = need_num(jc, "fwhm_nm", "comb") * 1e-9;
  rc.envelope.peak_field = get_or(jc, "peak_field", 1.0);
  rc.truncation = get_or(jc, "truncation", 1e-4);

  if (!doc.contains("excitation"))
    throw ConfigError("config: missing excitation section");
  const auto& je = doc.at("excitation");
  if (!je.contains("ground_level") || !je.contains("final_level"))
    throw ConfigError("config: excitation needs ground_level and final_level");
  rc.ground_level = je.at("ground_level").get<std::string>();
  rc.final_level = je.at("final_level").get<std::string>();
  rc.intermediate_window_hz = get_or(je, "intermediate_window_Hz", 2.0e7);
  rc.polarization_q = get_or(je, "polarization_q", 0);
  if (rc.polarization_q < -1 || rc.polarization_q > 1)
    throw ConfigError("config: polarization_q must be -1, 0 or 1");
  rc.mode_policy = get_or<std::string>(je, "mode_policy", "resonant-only");
  if (rc.mode_policy != "resonant-only" && rc.mode_policy != "full-sum")
    throw ConfigError("config: mode_policy must be resonant-only or full-sum");
  rc.two_photon_window_gamma_f = get_or(je, "two_photon_window_gamma_f", 1.0e3);
  if (je.contains("geometry")) {
    const auto& jg = je.at("geometry");
    const auto kind = get_or<std::string>(jg, "type", "traveling");
    if (kind == "standing")
      rc.geometry.kind = GeometrySpec::Kind::standing;
    else if (kind == "traveling")
      rc.geometry.kind = GeometrySpec::Kind::traveling;
    else
      throw ConfigError("config: geometry type must be traveling or standing");
    rc.geometry.cloud_length_m = get_or(jg, "cloud_length_m", 1.4187e-4);
    rc.geometry.samples = static_cast<int>(get_or(jg, "samples", 256.0));
    rc.geometry.theta_rad = get_or(jg, "theta_rad", 0.0);
    if (rc.geometry.samples < 1)
      throw ConfigError("config: geometry samples must be >= 1");
  }

  if (doc.contains("mask")) {
    const auto& jm = doc.at("mask");
    rc.mask.type = get_or<std::string>(jm, "type", "none");
    rc.mask.phi_rad = get_or(jm, "phi_rad", 0.0);
    rc.mask.edge_margin_hz = get_or(jm, "edge_margin_Hz", 3.5e9);
    rc.mask.width_a_hz = get_or(jm, "width_a_Hz", 0.5e12);
    rc.mask.width_b_hz = get_or(jm, "width_b_Hz", 6.0e12);
    if (jm.contains("edge_a_Hz")) rc.mask.edge_a_hz = jm.at("edge_a_Hz").get<double>();
    if (jm.contains("edge_b_Hz")) rc.mask.edge_b_hz = jm.at("edge_b_Hz").get<double>();
    rc.mask.pixel_width_hz = get_or(jm, "pixel_width_GHz", 0.0) * 1e9;
    rc.mask.pixel_offset_hz = get_or(jm, "offset_GHz", 0.0) * 1e9;
    if (jm.contains("segments")) {
      for (const auto& js : jm.at("segments")) {
        MaskSettings::Segment s{};
        if (js.contains("from_nm")) {
          // wavelength bounds swap roles in frequency
          s.from_hz = wavelength_to_frequency(need_num(js, "to_nm", "mask segment") * 1e-9);
          s.to_hz = wavelength_to_frequency(js.at("from_nm").get<double>() * 1e-9);
        } else {
          s.from_hz = need_num(js, "from_THz", "mask segment") * 1e12;
          s.to_hz = need_num(js, "to_THz", "mask segment") * 1e12;
        }
        s.phase_rad = need_num(js, "phase_rad", "mask segment");
        rc.mask.segments.push_back(s);
      }
      std::sort(rc.mask.segments.begin(), rc.mask.segments.end(),
                [](const auto& a, const auto& b) { return a.from_hz < b.from_hz; });
    }
  }

  if (doc.contains("experiment")) {
    const auto& jx = doc.at("experiment");
    if (jx.contains("fringe")) {
      FringeParams fp;
      fp.phi_points = static_cast<int>(get_or(jx.at("fringe"), "phi_points", 32.0));
      fp.phi_span_rad = get_or(jx.at("fringe"), "phi_span_rad", 2.0 * M_PI);
      if (fp.phi_points < 8)
        throw ConfigError("config: fringe needs phi_points >= 8");
      rc.fringe = fp;
    }
    if (jx.contains("enhance")) {
      EnhanceParams ep;
      const auto& j = jx.at("enhance");
      ep.offset_from_hz = get_or(j, "offset_from_Hz", -5.0e11);
      ep.offset_to_hz = get_or(j, "offset_to_Hz", 5.0e11);
      ep.offset_points = static_cast<int>(get_or(j, "offset_points", 41.0));
      if (ep.offset_points < 1 || !(ep.offset_from_hz < ep.offset_to_hz))
        throw ConfigError("config: bad enhance offset range");
      rc.enhance = ep;
    }
    if (jx.contains("scan_mask")) {
      ScanMaskParams sp;
      const auto& j = jx.at("scan_mask");
      sp.parameter = get_or<std::string>(j, "parameter", "");
      sp.from = need_num(j, "from", "scan_mask");
      sp.to = need_num(j, "to", "scan_mask");
      sp.points = static_cast<int>(need_num(j, "points", "scan_mask"));
      if (sp.points < 2) throw ConfigError("config: scan_mask needs points >= 2");
      if (sp.parameter != "phi" && sp.parameter != "mask_offset" &&
          sp.parameter != "width_a" && sp.parameter != "width_b")
        throw ConfigError("config: scan_mask parameter must be one of "
                          "phi, mask_offset, width_a, width_b");
      rc.scan_mask = sp;
    }
    if (jx.contains("paths")) {
      rc.paths.representative_two_mF = static_cast<int>(
          get_or(jx.at("paths"), "representative_two_mF", 2.0));
    }
  }

  rc.output_path = get_or<std::string>(doc, "output_path", "");
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return parse_run_config(doc,
                          std::filesystem::path(path).parent_path());
}

}  // namespace diamondcomb
