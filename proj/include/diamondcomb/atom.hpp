#pragma once

// Hyperfine level structure of the diamond configuration and the angular
// part of the dipole matrix elements.
//
// Phase convention (fixed throughout, Condon-Shortley consistent):
//   <F' m'| T^1_q |F m> = (-1)^(F'-m') ( F' 1 F ; -m' q m ) <F'||T||F>
//   <(J',I)F'||T||(J,I)F> = (-1)^(J'+I+F+1) sqrt((2F'+1)(2F+1))
//                           {J' F' I; F J 1} <J'||T||J>
// The J-basis reduced moments <J'||er||J> live in the data file as signed
// magnitudes; their relative signs follow the same convention applied to the
// LS fine-structure reduction with positive radial integrals.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "diamondcomb/errors.hpp"
#include "diamondcomb/wigner.hpp"

namespace diamondcomb {

struct HyperfineLevel {
  std::string label;  // e.g. "5P3/2 F=2"
  int L = 0;
  int two_J = 0;
  int two_F = 0;
  int two_I = 0;
  double energy_hz = 0.0;     // above the chosen zero level
  double linewidth_hz = 0.0;  // natural FWHM

  double J() const { return 0.5 * two_J; }
  double F() const { return 0.5 * two_F; }
  double I() const { return 0.5 * two_I; }
  // Term name, the label up to the first space ("5P3/2").
  std::string term() const { return label.substr(0, label.find(' ')); }
};

struct Sublevel {
  HyperfineLevel level;
  int two_mF = 0;
  double mF() const { return 0.5 * two_mF; }
};

class AtomSystem {
 public:
  const std::vector<HyperfineLevel>& levels() const { return levels_; }

  bool has_level(const std::string& label) const {
    return index_.count(label) != 0;
  }

  const HyperfineLevel& level(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end())
      throw PhysicsError("unknown level: " + label);
    return levels_[it->second];
  }

  // Signed J-basis reduced dipole moment for the level pair's terms,
  // 0 when no entry exists (dipole-forbidden at the term layer).
  double reduced_dipole(const HyperfineLevel& a, const HyperfineLevel& b) const {
    auto it = reduced_.find({a.term(), b.term()});
    if (it != reduced_.end()) return it->second;
    it = reduced_.find({b.term(), a.term()});
    if (it != reduced_.end()) return it->second;
    return 0.0;
  }

  void add_level(const HyperfineLevel& lv) {
    if (index_.count(lv.label))
      throw ConfigError("duplicate level label: " + lv.label);
    if (lv.two_F < std::abs(lv.two_J - lv.two_I) ||
        lv.two_F > lv.two_J + lv.two_I)
      throw PhysicsError("level " + lv.label + ": F outside |J-I|..J+I");
    if (!(lv.linewidth_hz >= 0.0) || !std::isfinite(lv.energy_hz))
      throw PhysicsError("level " + lv.label + ": bad linewidth or energy");
    if (lv.L == 0 && lv.linewidth_hz != 0.0)
      throw PhysicsError("ground level " + lv.label + " must have linewidth 0");
    index_[lv.label] = levels_.size();
    levels_.push_back(lv);
  }

  void add_reduced_dipole(const std::string& lower, const std::string& upper,
                          double signed_moment) {
    int L_lo = -1, L_up = -1;
    for (const auto& lv : levels_) {
      if (lv.term() == lower) L_lo = lv.L;
      if (lv.term() == upper) L_up = lv.L;
    }
    if (L_lo < 0) throw ConfigError("dipole entry references missing level term: " + lower);
    if (L_up < 0) throw ConfigError("dipole entry references missing level term: " + upper);
    if (std::abs(L_up - L_lo) != 1)
      throw PhysicsError("dipole entry " + lower + " -> " + upper +
                         " violates the Delta L = +-1 selection rule");
    reduced_[{lower, upper}] = signed_moment;
  }

 private:
  std::vector<HyperfineLevel> levels_;  // data-file order (summation contract)
  std::map<std::string, std::size_t> index_;
  std::map<std::pair<std::string, std::string>, double> reduced_;
};

// F-basis reduction factor relative to <J'||r||J> (doubled arguments).
inline double hyperfine_reduction(int two_Jg, int two_Fg, int two_Je,
                                  int two_Fe, int two_I) {
  long e = (two_Je + two_I + two_Fg + 2) / 2;
  double phase = (e % 2 == 0) ? 1.0 : -1.0;
  double dim = std::sqrt(double(two_Fe + 1) * double(two_Fg + 1));
  return phase * dim *
         wigner_6j(0.5 * two_Je, 0.5 * two_Fe, 0.5 * two_I, 0.5 * two_Fg,
                   0.5 * two_Jg, 1.0);
}

// Signed angular part of <to | r_q | from> relative to the J-basis reduced
// moment. Zero whenever a selection rule forbids the transition.
inline double angular_dipole_factor(const Sublevel& from, const Sublevel& to,
                                    int q) {
  if (q < -1 || q > 1) throw std::invalid_argument("polarization q must be -1, 0 or +1");
  if (std::abs(from.two_mF) > from.level.two_F ||
      std::abs(to.two_mF) > to.level.two_F)
    throw std::invalid_argument("|mF| exceeds F");
  if (to.two_mF != from.two_mF + 2 * q) return 0.0;

  const int two_Fg = from.level.two_F, two_Fe = to.level.two_F;
  const double three_j =
      wigner_3j(0.5 * two_Fe, 1.0, 0.5 * two_Fg, -to.mF(), double(q), from.mF());
  if (three_j == 0.0) return 0.0;
  long e = (two_Fe - to.two_mF) / 2;
  double phase = (e % 2 == 0) ? 1.0 : -1.0;
  return phase * three_j *
         hyperfine_reduction(from.level.two_J, two_Fg, to.level.two_J, two_Fe,
                             from.level.two_I);
}

inline double transition_frequency(const AtomSystem& sys,
                                   const HyperfineLevel& a,
                                   const HyperfineLevel& b) {
  // Both levels must belong to the system.
  return sys.level(b.label).energy_hz - sys.level(a.label).energy_hz;
}

namespace detail {

inline int parse_twice(const nlohmann::json& j, const char* key,
                       const std::string& ctx) {
  if (!j.contains(key))
    throw ConfigError("atom data: level " + ctx + " missing field " + key);
  double v = j.at(key).get<double>();
  long t = std::lround(2.0 * v);
  if (std::fabs(2.0 * v - double(t)) > 1e-9 || t < 0)
    throw ConfigError("atom data: level " + ctx + ": field " + key +
                      " must be a non-negative half-integer");
  return static_cast<int>(t);
}

}  // namespace detail

inline AtomSystem load_atom_system(const nlohmann::json& doc) {
  if (!doc.contains("levels") || !doc["levels"].is_array() ||
      doc["levels"].empty())
    throw ConfigError("atom data: missing or empty 'levels' array");
  if (!doc.contains("nuclear_spin"))
    throw ConfigError("atom data: missing 'nuclear_spin'");

  const double I = doc["nuclear_spin"].get<double>();
  long two_I = std::lround(2.0 * I);
  if (std::fabs(2.0 * I - double(two_I)) > 1e-9 || two_I < 0)
    throw ConfigError("atom data: nuclear_spin must be half-integer >= 0");

  AtomSystem sys;
  for (const auto& jl : doc["levels"]) {
    HyperfineLevel lv;
    if (!jl.contains("label"))
      throw ConfigError("atom data: level without label");
    lv.label = jl["label"].get<std::string>();
    if (!jl.contains("L") || !jl.contains("energy_Hz") ||
        !jl.contains("linewidth_Hz"))
      throw ConfigError("atom data: level " + lv.label + " missing fields");
    lv.L = jl["L"].get<int>();
    if (lv.L < 0) throw ConfigError("atom data: negative L in " + lv.label);
    lv.two_J = detail::parse_twice(jl, "J", lv.label);
    lv.two_F = detail::parse_twice(jl, "F", lv.label);
    lv.two_I = static_cast<int>(two_I);
    lv.energy_hz = jl["energy_Hz"].get<double>();
    lv.linewidth_hz = jl["linewidth_Hz"].get<double>();
    sys.add_level(lv);
  }

  if (!doc.contains("reduced_dipoles") || !doc["reduced_dipoles"].is_array())
    throw ConfigError("atom data: missing 'reduced_dipoles'");
  for (const auto& jd : doc["reduced_dipoles"]) {
    if (!jd.contains("lower") || !jd.contains("upper") ||
        !jd.contains("reduced_moment") || !jd.contains("sign"))
      throw ConfigError("atom data: dipole entry missing fields");
    double moment = jd["reduced_moment"].get<double>();
    int sign = jd["sign"].get<int>();
    if (moment < 0.0 || (sign != 1 && sign != -1))
      throw ConfigError("atom data: dipole entry needs moment >= 0, sign +-1");
    sys.add_reduced_dipole(jd["lower"].get<std::string>(),
                           jd["upper"].get<std::string>(), sign * moment);
  }

  // Optional consistency block: expected splittings, checked to 1 kHz.
  if (doc.contains("splittings_check")) {
    for (const auto& jc : doc["splittings_check"]) {
      const auto& a = sys.level(jc.at("a").get<std::string>());
      const auto& b = sys.level(jc.at("b").get<std::string>());
      double expect = jc.at("splitting_Hz").get<double>();
      double got = b.energy_hz - a.energy_hz;
      if (std::fabs(got - expect) > 1e3)
        throw PhysicsError("atom data: splitting " + a.label + " -> " +
                           b.label + " off by more than 1 kHz");
    }
  }
  return sys;
}

inline AtomSystem load_atom_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open atom data file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError("malformed atom data document " + path + ": " + e.what());
  }
  return load_atom_system(doc);
}

}  // namespace diamondcomb
