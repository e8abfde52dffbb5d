#pragma once

// JSON run configuration for the command-line front end.
//
// Sections: tech, design, temperature, supply, sweeps, sizing, mc,
// small_signal, leakage, output. Unknown keys are rejected so that typos do
// not silently fall back to defaults.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scmref/bias_generator.hpp"
#include "scmref/errors.hpp"
#include "scmref/leakage.hpp"
#include "scmref/reference_model.hpp"
#include "scmref/smallsignal.hpp"
#include "scmref/tech.hpp"
#include "scmref/temperature.hpp"

namespace scmref::config {

using json = nlohmann::json;

struct Range {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
};

struct ValleySpec {
  std::vector<double> delta_vts{0.01, 0.02, 0.03};  // [V]
  Range alphas{2.0, 8.0, 7};
  double k_lo = 1.0;
  double k_hi = 100.0;
  std::optional<Range> tcmap_alphas;
  std::optional<Range> tcmap_k_ptats;  // log-spaced
};

struct SizingSpec {
  std::string mode = "acm";  // acm | lut
  bool methodology = true;
  std::optional<double> i_f6;
  std::optional<double> mirror_if;
  std::string profile = "bulk";  // bulk | fdsoi, picks default inversion levels
  std::optional<std::string> lut_path;
  double lut_length_m = 1e-6;
};

struct McSpec {
  std::string mode = "nonlinear";  // nonlinear | first_order
  std::size_t trials = 1000;
  std::optional<std::uint64_t> seed;
  double sigma_vx = 1e-3;             // [V]
  double temperature_c = 25.0;
  std::optional<double> s_iref_pct_per_mv;  // pins S_IREF in first-order mode
  std::size_t histogram_bins = 20;
};

struct SmallSignalSpec {
  SmallSignalSet set;
  std::optional<double> i_ref;               // [A], defaults to the design target
  std::optional<double> s_iref_pct_per_mv;   // defaults to the model value at 25 degC
  std::optional<double> reference_ls_vx;     // user-supplied comparison [V/V]
  std::optional<double> reference_ls_iref;   // [%/V]
};

struct RunConfig {
  TechProfile tech;
  DesignPoint design;
  std::vector<Temperature> grid = default_temperature_grid();
  std::vector<double> supply_v;
  std::vector<double> solve_temperatures_c;  // extra report points; empty = grid
  ValleySpec valley;
  SizingSpec sizing;
  std::optional<McSpec> mc;
  std::optional<SmallSignalSpec> small_signal;
  std::optional<LeakagePerturbation> leakage;
  std::string output_dir = "out";
  std::string format = "csv";
};

namespace detail {

inline void allow_keys(const json& j, const std::string& section, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw InputError("config: section '" + section + "' must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw InputError("config: unknown key '" + section + "." + k + "'");
  }
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw InputError("config: '" + path + "' must be a number");
  return j.get<double>();
}

template <class T>
void read(const json& j, const char* key, const std::string& section, T& out) {
  if (!j.contains(key)) return;
  const std::string path = section + "." + key;
  const json& v = j.at(key);
  if constexpr (std::is_same_v<T, double>) {
    out = number(v, path);
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    out = number(v, path);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw InputError("config: '" + path + "' must be a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string> || std::is_same_v<T, std::optional<std::string>>) {
    if (!v.is_string()) throw InputError("config: '" + path + "' must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, std::size_t>) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw InputError("config: '" + path + "' must be a non-negative integer");
    }
    out = v.get<std::size_t>();
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!v.is_array()) throw InputError("config: '" + path + "' must be an array of numbers");
    out.clear();
    for (const auto& e : v) out.push_back(number(e, path));
  } else {
    static_assert(sizeof(T) == 0, "unsupported config type");
  }
}

inline Range read_range(const json& j, const std::string& path) {
  allow_keys(j, path, {"start", "stop", "count"});
  Range r;
  if (!j.contains("start") || !j.contains("stop") || !j.contains("count")) {
    throw InputError("config: '" + path + "' needs start, stop and count");
  }
  read(j, "start", path, r.start);
  read(j, "stop", path, r.stop);
  read(j, "count", path, r.count);
  if (r.count == 0) throw InputError("config: '" + path + "' is an empty range");
  if (r.count > 1 && !(r.stop > r.start)) throw InputError("config: '" + path + "' needs stop > start");
  return r;
}

inline DeviceFlavor read_flavor(const json& j, const std::string& path) {
  allow_keys(j, path, {"name", "vt0", "vt0_tempco", "isq_ref", "n"});
  DeviceFlavor f;
  read(j, "name", path, f.name);
  read(j, "vt0", path, f.vt0);
  read(j, "vt0_tempco", path, f.vt0_tempco);
  read(j, "isq_ref", path, f.isq_ref);
  read(j, "n", path, f.n);
  return f;
}

inline TechProfile read_tech(const json& j) {
  allow_keys(j, "tech", {"n", "m", "isq_ref", "isq_m1", "isq_weak", "vt0", "vt0_tempco", "body_factor_linear",
                         "body_factor_sqrt", "fermi_2phi", "fermi_2phi_tempco", "flavors"});
  TechProfile t;
  read(j, "n", "tech", t.n);
  read(j, "m", "tech", t.m);
  read(j, "isq_ref", "tech", t.isq_ref);
  read(j, "isq_m1", "tech", t.isq_m1);
  read(j, "isq_weak", "tech", t.isq_weak);
  read(j, "vt0", "tech", t.vt0);
  read(j, "vt0_tempco", "tech", t.vt0_tempco);
  read(j, "body_factor_linear", "tech", t.body_factor_linear);
  read(j, "body_factor_sqrt", "tech", t.body_factor_sqrt);
  read(j, "fermi_2phi", "tech", t.fermi_2phi);
  read(j, "fermi_2phi_tempco", "tech", t.fermi_2phi_tempco);
  if (j.contains("flavors")) {
    if (!j["flavors"].is_array()) throw InputError("config: 'tech.flavors' must be an array");
    for (std::size_t k = 0; k < j["flavors"].size(); ++k) {
      t.flavors.push_back(read_flavor(j["flavors"][k], "tech.flavors[" + std::to_string(k) + "]"));
    }
  }
  return t;
}

inline DesignPoint read_design(const json& j) {
  allow_keys(j, "design",
             {"alpha", "k_ptat", "n_ratio", "m_ratio", "j_ratio", "k_ratio", "delta_vt", "i_ref_target"});
  DesignPoint d;
  read(j, "alpha", "design", d.alpha);
  read(j, "k_ptat", "design", d.k_ptat);
  read(j, "n_ratio", "design", d.n_ratio);
  read(j, "m_ratio", "design", d.m_ratio);
  read(j, "delta_vt", "design", d.delta_vt);
  read(j, "i_ref_target", "design", d.i_ref_target);
  // J and K default to J = 1, K = K_PTAT.
  d.j_ratio = 1.0;
  d.k_ratio = d.k_ptat;
  read(j, "j_ratio", "design", d.j_ratio);
  if (j.contains("k_ratio")) {
    read(j, "k_ratio", "design", d.k_ratio);
  } else {
    d.k_ratio = d.k_ptat / d.j_ratio;
  }
  return d;
}

inline std::vector<Temperature> read_grid(const json& j) {
  allow_keys(j, "temperature", {"start_c", "stop_c", "step_c", "points_c"});
  if (j.contains("points_c")) {
    if (j.contains("start_c") || j.contains("stop_c") || j.contains("step_c")) {
      throw InputError("config: 'temperature' takes either points_c or start_c/stop_c/step_c");
    }
    std::vector<double> pts;
    read(j, "points_c", "temperature", pts);
    std::vector<Temperature> grid;
    for (double c : pts) grid.push_back(Temperature::celsius(c));
    return grid;
  }
  double start = -40.0;
  double stop = 85.0;
  double step = 5.0;
  read(j, "start_c", "temperature", start);
  read(j, "stop_c", "temperature", stop);
  read(j, "step_c", "temperature", step);
  return celsius_grid(start, stop, step);
}

inline ValleySpec read_valley(const json& j) {
  allow_keys(j, "sweeps.valley", {"delta_vts", "alphas", "k_lo", "k_hi", "tcmap_alphas", "tcmap_k_ptats"});
  ValleySpec v;
  read(j, "delta_vts", "sweeps.valley", v.delta_vts);
  if (j.contains("alphas")) v.alphas = read_range(j["alphas"], "sweeps.valley.alphas");
  read(j, "k_lo", "sweeps.valley", v.k_lo);
  read(j, "k_hi", "sweeps.valley", v.k_hi);
  if (j.contains("tcmap_alphas")) v.tcmap_alphas = read_range(j["tcmap_alphas"], "sweeps.valley.tcmap_alphas");
  if (j.contains("tcmap_k_ptats")) {
    v.tcmap_k_ptats = read_range(j["tcmap_k_ptats"], "sweeps.valley.tcmap_k_ptats");
  }
  if (v.tcmap_alphas.has_value() != v.tcmap_k_ptats.has_value()) {
    throw InputError("config: tcmap needs both tcmap_alphas and tcmap_k_ptats");
  }
  if (v.delta_vts.empty()) throw InputError("config: 'sweeps.valley.delta_vts' is empty");
  if (!(v.k_lo >= 1.0) || !(v.k_hi > v.k_lo)) throw InputError("config: need 1 <= k_lo < k_hi");
  return v;
}

inline SizingSpec read_sizing(const json& j) {
  allow_keys(j, "sizing", {"mode", "methodology", "i_f6", "mirror_if", "profile", "lut_path", "lut_length_m"});
  SizingSpec s;
  read(j, "mode", "sizing", s.mode);
  read(j, "methodology", "sizing", s.methodology);
  read(j, "i_f6", "sizing", s.i_f6);
  read(j, "mirror_if", "sizing", s.mirror_if);
  read(j, "profile", "sizing", s.profile);
  read(j, "lut_path", "sizing", s.lut_path);
  read(j, "lut_length_m", "sizing", s.lut_length_m);
  if (s.mode != "acm" && s.mode != "lut") throw InputError("config: 'sizing.mode' must be acm or lut");
  if (s.profile != "bulk" && s.profile != "fdsoi") throw InputError("config: 'sizing.profile' must be bulk or fdsoi");
  if (s.mode == "lut" && !s.lut_path) throw InputError("config: LUT mode needs 'sizing.lut_path'");
  return s;
}

inline McSpec read_mc(const json& j) {
  allow_keys(j, "mc", {"mode", "trials", "seed", "sigma_vx", "temperature_c", "s_iref_pct_per_mv", "histogram_bins"});
  McSpec m;
  read(j, "mode", "mc", m.mode);
  read(j, "trials", "mc", m.trials);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw InputError("config: 'mc.seed' must be a non-negative integer");
    m.seed = j["seed"].get<std::uint64_t>();
  }
  read(j, "sigma_vx", "mc", m.sigma_vx);
  read(j, "temperature_c", "mc", m.temperature_c);
  read(j, "s_iref_pct_per_mv", "mc", m.s_iref_pct_per_mv);
  read(j, "histogram_bins", "mc", m.histogram_bins);
  if (m.mode != "nonlinear" && m.mode != "first_order") {
    throw InputError("config: 'mc.mode' must be nonlinear or first_order");
  }
  if (!(m.sigma_vx >= 0.0)) throw InputError("config: 'mc.sigma_vx' must be >= 0");
  if (m.histogram_bins == 0) throw InputError("config: 'mc.histogram_bins' must be > 0");
  return m;
}

inline SmallSignalSpec read_small_signal(const json& j) {
  allow_keys(j, "small_signal", {"gm6", "gm6c", "gd5", "gd6", "gm8", "gd8", "j_ratio", "c_f", "av_ota", "i_ref",
                                 "s_iref_pct_per_mv", "reference_ls_vx", "reference_ls_iref"});
  SmallSignalSpec s;
  const char* sec = "small_signal";
  read(j, "gm6", sec, s.set.gm6);
  read(j, "gm6c", sec, s.set.gm6c);
  read(j, "gd5", sec, s.set.gd5);
  read(j, "gd6", sec, s.set.gd6);
  read(j, "gm8", sec, s.set.gm8);
  read(j, "gd8", sec, s.set.gd8);
  read(j, "j_ratio", sec, s.set.j_ratio);
  read(j, "c_f", sec, s.set.c_f);
  read(j, "av_ota", sec, s.set.av_ota);
  read(j, "i_ref", sec, s.i_ref);
  read(j, "s_iref_pct_per_mv", sec, s.s_iref_pct_per_mv);
  read(j, "reference_ls_vx", sec, s.reference_ls_vx);
  read(j, "reference_ls_iref", sec, s.reference_ls_iref);
  try {
    s.set.validate();
  } catch (const DomainError& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return s;
}

inline std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || p.front() == '/' || base_dir.empty()) return p;
  return base_dir + "/" + p;
}

}  // namespace detail

/// Parses a configuration document. Relative file paths inside it are
/// resolved against `base_dir`.
inline RunConfig parse(const json& root, const std::string& base_dir = "") {
  using namespace detail;
  allow_keys(root, "<root>", {"tech", "design", "temperature", "supply", "sweeps", "sizing", "mc", "small_signal",
                              "leakage", "output"});
  RunConfig c;
  try {
    if (root.contains("tech")) c.tech = read_tech(root["tech"]);
    if (root.contains("design")) c.design = read_design(root["design"]);
    if (root.contains("temperature")) c.grid = read_grid(root["temperature"]);
    if (root.contains("supply")) {
      allow_keys(root["supply"], "supply", {"points_v"});
      read(root["supply"], "points_v", "supply", c.supply_v);
    }
    if (root.contains("sweeps")) {
      const json& s = root["sweeps"];
      allow_keys(s, "sweeps", {"solve_temperatures_c", "valley"});
      read(s, "solve_temperatures_c", "sweeps", c.solve_temperatures_c);
      if (s.contains("valley")) c.valley = read_valley(s["valley"]);
    }
    if (root.contains("sizing")) c.sizing = read_sizing(root["sizing"]);
    if (root.contains("mc")) c.mc = read_mc(root["mc"]);
    if (root.contains("small_signal")) c.small_signal = read_small_signal(root["small_signal"]);
    if (root.contains("output")) {
      allow_keys(root["output"], "output", {"dir", "format"});
      read(root["output"], "dir", "output", c.output_dir);
      read(root["output"], "format", "output", c.format);
    }
    if (c.sizing.lut_path) c.sizing.lut_path = resolve(base_dir, *c.sizing.lut_path);
    if (root.contains("leakage")) {
      const json& l = root["leakage"];
      allow_keys(l, "leakage", {"vx_csv", "vb6_csv", "scale"});
      std::string vx;
      std::string vb6;
      double scale = 1.0;
      read(l, "vx_csv", "leakage", vx);
      read(l, "vb6_csv", "leakage", vb6);
      read(l, "scale", "leakage", scale);
      LeakagePerturbation p;
      if (!vx.empty()) p.vx = read_leakage_csv(resolve(base_dir, vx));
      if (!vb6.empty()) p.vb6 = read_leakage_csv(resolve(base_dir, vb6));
      c.leakage = p.scaled(scale);
    }
    c.tech.validate();
    c.design.validate();
    require_increasing(c.grid, "config temperature");
  } catch (const DomainError& e) {
    throw InputError(std::string("config: ") + e.what());
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (c.format != "csv" && c.format != "json") throw InputError("config: 'output.format' must be csv or json");
  return c;
}

inline RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  json root;
  try {
    root = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path + "': " + e.what());
  }
  const auto slash = path.find_last_of('/');
  return parse(root, slash == std::string::npos ? "" : path.substr(0, slash));
}

}  // namespace scmref::config
