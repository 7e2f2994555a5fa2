// Command-line driver: loads a run configuration, executes the named
// experiment, writes the tabular result plus a manifest.
//
// Subcommands: fringe, enhance, paths, scan-mask, validate.
// Exit codes: 0 success, 2 config error, 3 physics/validation error,
// 4 numerical failure.

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diamondcomb/analysis.hpp"
#include "diamondcomb/runconfig.hpp"
#include "sha256.hpp"

namespace dc = diamondcomb;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dc::ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dc::ConfigError("cannot write output file: " + path);
  out << bytes;
}

void write_manifest(const std::string& subcommand, const std::string& cfg_path,
                    const dc::RunConfig& rc, const std::string& out_path,
                    const std::string& out_bytes, int threads,
                    long long seed) {
  nlohmann::json man;
  man["tool"] = "diamondcomb";
  man["version"] = kVersion;
  man["subcommand"] = subcommand;
  man["config_path"] = cfg_path;
  man["config"] = rc.echo;
  man["threads"] = threads;
  man["seed"] = seed;
  man["atom_data_sha256"] = dc::tool::sha256_hex(read_file(rc.atom_data_path));
  man["output_path"] = out_path;
  man["output_sha256"] = dc::tool::sha256_hex(out_bytes);
  write_file(out_path + ".manifest.json", man.dump(2) + "\n");
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = a + (b - a) * static_cast<double>(i) / std::max(1, n - 1);
  return v;
}

int run_fringe(const std::string& cfg_path, const dc::RunConfig& rc,
               const std::string& out_path, int threads, long long seed) {
  if (!rc.fringe)
    throw dc::ConfigError("config has no experiment.fringe section");
  const auto atom = rc.load_atom();
  auto cfg = rc.build_excitation(atom, threads);
  std::vector<double> phis(rc.fringe->phi_points);
  for (int i = 0; i < rc.fringe->phi_points; ++i)
    phis[i] = rc.fringe->phi_span_rad * i / rc.fringe->phi_points;
  const auto scan = dc::fringe_scan(cfg, phis);
  const auto fit = dc::fit_fringe(scan);
  std::ostringstream os;
  dc::write_fringe_csv(os, scan, fit);
  write_file(out_path, os.str());
  write_manifest("fringe", cfg_path, rc, out_path, os.str(), threads, seed);
  std::cout << "fringe: " << scan.size() << " points, visibility "
            << dc::format_sig12(dc::visibility(fit)) << ", c3 "
            << dc::format_sig12(fit.c3) << " rad -> " << out_path << "\n";
  return 0;
}

int run_enhance(const std::string& cfg_path, const dc::RunConfig& rc,
                const std::string& out_path, int threads, long long seed) {
  if (!rc.enhance)
    throw dc::ConfigError("config has no experiment.enhance section");
  const auto atom = rc.load_atom();
  auto cfg = rc.build_excitation(atom, threads);
  const auto& ep = *rc.enhance;
  const auto scan = dc::enhancement_scan(
      cfg, linspace(ep.offset_from_hz, ep.offset_to_hz, ep.offset_points));
  std::ostringstream os;
  dc::write_enhancement_csv(os, scan);
  write_file(out_path, os.str());
  write_manifest("enhance", cfg_path, rc, out_path, os.str(), threads, seed);
  std::cout << "enhance: peak ratio " << dc::format_sig12(scan.peak_ratio)
            << " at offset " << dc::format_sig12(scan.peak_offset_hz)
            << " Hz -> " << out_path << "\n";
  return 0;
}

// Table-1 style output: one row per intermediate for the representative
// mF chain, with the nearest-mode detuning, relative amplitude, phase and
// the signs of the two dipole factors along the path.
int run_paths(const std::string& cfg_path, const dc::RunConfig& rc,
              const std::string& out_path, int threads, long long seed) {
  const auto atom = rc.load_atom();
  auto cfg = rc.build_excitation(atom, threads);
  const auto& g = atom.level(rc.ground_level);
  const auto& f = atom.level(rc.final_level);
  const int two_mg = rc.paths.representative_two_mF;
  const int q = cfg.polarization_q;
  dc::Sublevel ground{g, two_mg};
  dc::Sublevel fin{f, two_mg + 4 * q};
  const auto intermediates = dc::select_intermediates(cfg);
  const auto K = static_cast<std::int64_t>(std::llround(
      ((f.energy_hz - g.energy_hz) - 2.0 * cfg.comb.f_o_hz()) / cfg.comb.f_r_hz()));

  struct Row {
    std::string label;
    double detuning, amp, phase_deg;
    double mu_gi, mu_if;
  };
  std::vector<Row> rows;
  double amp_max = 0.0;
  for (const auto& lv : intermediates) {
    dc::Sublevel mid{lv, two_mg + 2 * q};
    if (std::abs(mid.two_mF) > lv.two_F) continue;
    const double nu_gi = lv.energy_hz - g.energy_hz;
    const auto n = cfg.comb.mode_index_near(nu_gi);
    const auto amp = dc::pair_amplitude(cfg, std::min(n, K - n),
                                        std::max(n, K - n), ground, mid, fin);
    if (amp == std::complex<double>(0.0, 0.0)) continue;
    Row r;
    r.label = lv.label;
    r.detuning = cfg.comb.mode_frequency(n) - nu_gi;
    r.amp = std::abs(amp);
    r.phase_deg = std::arg(amp) * 180.0 / M_PI;
    r.mu_gi = dc::angular_dipole_factor(ground, mid, q) *
              atom.reduced_dipole(g, lv);
    r.mu_if = dc::angular_dipole_factor(mid, fin, q) *
              atom.reduced_dipole(lv, f);
    amp_max = std::max(amp_max, r.amp);
    rows.push_back(r);
  }
  std::ostringstream os;
  os << "intermediate,detuning_Hz,relative_amplitude,phase_deg,sign_mu_gi,sign_mu_if\n";
  for (const auto& r : rows) {
    os << r.label << "," << dc::format_sig12(r.detuning) << ","
       << dc::format_sig12(amp_max > 0 ? r.amp / amp_max : 0.0) << ","
       << dc::format_sig12(r.phase_deg) << "," << (r.mu_gi < 0 ? "-1" : "+1")
       << "," << (r.mu_if < 0 ? "-1" : "+1") << "\n";
  }
  write_file(out_path, os.str());
  write_manifest("paths", cfg_path, rc, out_path, os.str(), threads, seed);
  std::cout << "paths: " << rows.size() << " rows -> " << out_path << "\n";
  return 0;
}

int run_scan_mask(const std::string& cfg_path, const dc::RunConfig& rc,
                  const std::string& out_path, int threads, long long seed) {
  if (!rc.scan_mask)
    throw dc::ConfigError("config has no experiment.scan_mask section");
  const auto atom = rc.load_atom();
  auto cfg = rc.build_excitation(atom, threads);
  const auto& sp = *rc.scan_mask;
  const auto xs = linspace(sp.from, sp.to, sp.points);
  std::vector<std::pair<double, double>> pts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    dc::RunConfig r2 = rc;
    if (sp.parameter == "phi") r2.mask.phi_rad = xs[i];
    else if (sp.parameter == "width_a") r2.mask.width_a_hz = xs[i];
    else if (sp.parameter == "width_b") r2.mask.width_b_hz = xs[i];
    dc::ExcitationConfig c = cfg;
    c.mask = (sp.parameter == "mask_offset")
                 ? dc::translate_mask(cfg.mask, xs[i])
                 : r2.build_mask(atom);
    const double p = (c.geometry.kind == dc::GeometrySpec::Kind::standing)
                         ? dc::standing_wave_population(c)
                         : dc::population(c);
    pts[i] = {xs[i], p};
  }
  std::ostringstream os;
  dc::write_scan_csv(os, sp.parameter, pts);
  write_file(out_path, os.str());
  write_manifest("scan-mask", cfg_path, rc, out_path, os.str(), threads, seed);
  std::cout << "scan-mask: " << pts.size() << " points -> " << out_path << "\n";
  return 0;
}

// Schema + physics validation without running an experiment: lists the four
// resonant diamond legs with their mode indices and detunings, and the
// detunings of the other ground state's transitions.
int run_validate(const dc::RunConfig& rc, int threads) {
  const auto atom = rc.load_atom();
  auto cfg = rc.build_excitation(atom, threads);
  const auto& g = atom.level(rc.ground_level);
  const auto& f = atom.level(rc.final_level);
  const auto intermediates = dc::select_intermediates(cfg);
  const auto K = static_cast<std::int64_t>(std::llround(
      ((f.energy_hz - g.energy_hz) - 2.0 * cfg.comb.f_o_hz()) / cfg.comb.f_r_hz()));

  std::cout << "config: OK (schema, atom data, comb invariants)\n";
  std::cout << "ground " << g.label << ", final " << f.label << ", K = " << K
            << "\n";
  std::cout << "two-photon detuning: "
            << dc::format_sig12(cfg.comb.pair_sum_hz(K) -
                                (f.energy_hz - g.energy_hz))
            << " Hz\n";
  bool ok = true;
  for (const auto& lv : intermediates) {
    const double nu_gi = lv.energy_hz - g.energy_hz;
    const double nu_if = f.energy_hz - lv.energy_hz;
    const auto n = cfg.comb.mode_index_near(nu_gi);
    const auto m = K - n;
    if (!cfg.comb.in_range(m)) {
      std::cout << "  " << lv.label << ": no two-photon partner in range\n";
      ok = false;
      continue;
    }
    const double d1 = cfg.comb.mode_frequency(n) - nu_gi;
    const double d2 = cfg.comb.mode_frequency(m) - nu_if;
    std::cout << "  leg " << g.label << " -> " << lv.label << ": mode " << n
              << ", detuning " << dc::format_sig12(d1) << " Hz\n";
    std::cout << "  leg " << lv.label << " -> " << f.label << ": mode " << m
              << ", detuning " << dc::format_sig12(d2) << " Hz\n";
  }
  // transitions from the other hyperfine ground level, if present
  for (const auto& lv : atom.levels()) {
    if (lv.term() != g.term() || lv.label == g.label) continue;
    for (const auto& im : intermediates) {
      const double nu = im.energy_hz - lv.energy_hz;
      try {
        const auto n = cfg.comb.mode_index_near(nu);
        std::cout << "  other-ground " << lv.label << " -> " << im.label
                  << ": detuning "
                  << dc::format_sig12(cfg.comb.mode_frequency(n) - nu)
                  << " Hz\n";
      } catch (const std::out_of_range&) {
      }
    }
    const double nu2 = f.energy_hz - lv.energy_hz;
    const auto K2 = static_cast<std::int64_t>(
        std::llround((nu2 - 2.0 * cfg.comb.f_o_hz()) / cfg.comb.f_r_hz()));
    std::cout << "  other-ground " << lv.label << " two-photon detuning: "
              << dc::format_sig12(cfg.comb.pair_sum_hz(K2) - nu2) << " Hz\n";
  }
  std::cout << (ok ? "validate: PASS\n" : "validate: FAIL\n");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-comb two-photon excitation of a diamond four-level atom"};
  app.set_version_flag("--version", kVersion);

  std::string config_path, output_path;
  int threads = 1;
  long long seed = 0;  // reserved; no stochastic component yet
  app.add_option("--threads", threads, "worker thread cap (results identical)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "reserved");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (JSON)")
        ->required();
    sub->add_option("--output", output_path, "output path override");
  };
  auto* sc_fringe = app.add_subcommand("fringe", "phase-scan of the experiment-1 mask");
  auto* sc_enhance = app.add_subcommand("enhance", "mask-offset enhancement scan");
  auto* sc_paths = app.add_subcommand("paths", "per-intermediate path table");
  auto* sc_scan = app.add_subcommand("scan-mask", "user-defined mask parameter sweep");
  auto* sc_validate = app.add_subcommand("validate", "validate config and resonances");
  for (auto* s : {sc_fringe, sc_enhance, sc_paths, sc_scan, sc_validate})
    add_common(s);
  app.require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    dc::RunConfig rc = dc::load_run_config(config_path);
    std::string out = output_path.empty() ? rc.output_path : output_path;
    if (out.empty() && !sc_validate->parsed())
      throw dc::ConfigError("no output path (config output_path or --output)");
    if (sc_fringe->parsed()) return run_fringe(config_path, rc, out, threads, seed);
    if (sc_enhance->parsed()) return run_enhance(config_path, rc, out, threads, seed);
    if (sc_paths->parsed()) return run_paths(config_path, rc, out, threads, seed);
    if (sc_scan->parsed()) return run_scan_mask(config_path, rc, out, threads, seed);
    if (sc_validate->parsed()) return run_validate(rc, threads);
  } catch (const dc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const dc::PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << "\n";
    return 3;
  } catch (const dc::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
