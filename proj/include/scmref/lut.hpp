#pragma once

// Sampled device characteristics for lookup-table sizing.
//
// A table holds the forward (saturation) drain current per unit width and
// g_m/I_D on a rectangular (V_G, V_S) grid, both voltages referred to the
// body. The reverse component of a non-saturated device is the same function
// evaluated at V_S = V_D.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scmref/acm.hpp"
#include "scmref/errors.hpp"
#include "scmref/tech.hpp"
#include "scmref/temperature.hpp"

namespace scmref {

class DeviceLUT {
 public:
  DeviceLUT() = default;

  /// `id_per_w` and `gm_over_id` are vg-major: index ig * vs.size() + is.
  DeviceLUT(std::vector<double> vg, std::vector<double> vs, std::vector<double> id_per_w,
            std::vector<double> gm_over_id, double length_m)
      : vg_(std::move(vg)), vs_(std::move(vs)), id_(std::move(id_per_w)), gmid_(std::move(gm_over_id)),
        length_(length_m) {
    validate();
    log_id_.resize(id_.size());
    std::transform(id_.begin(), id_.end(), log_id_.begin(), [](double v) { return std::log(v); });
  }

  const std::vector<double>& vg_grid() const noexcept { return vg_; }
  const std::vector<double>& vs_grid() const noexcept { return vs_; }
  const std::vector<double>& id_per_w_table() const noexcept { return id_; }
  const std::vector<double>& gm_over_id_table() const noexcept { return gmid_; }
  double length() const noexcept { return length_; }

  bool covers(double vg, double vs) const {
    return vg >= vg_.front() && vg <= vg_.back() && vs >= vs_.front() && vs <= vs_.back();
  }

  /// Bilinear in ln(I_D / W).
  double id_per_w(double vg, double vs) const { return std::exp(bilinear(log_id_, vg, vs)); }

  double gm_over_id(double vg, double vs) const { return bilinear(gmid_, vg, vs); }

  /// Same table with every current multiplied by `factor`.
  DeviceLUT current_scaled(double factor) const {
    auto id = id_;
    for (auto& v : id) v *= factor;
    return DeviceLUT(vg_, vs_, std::move(id), gmid_, length_);
  }

 private:
  void validate() const {
    auto strictly_increasing = [](const std::vector<double>& g) {
      for (std::size_t k = 1; k < g.size(); ++k) {
        if (!(g[k] > g[k - 1])) return false;
      }
      return g.size() >= 2;
    };
    if (!strictly_increasing(vg_)) throw InputError("LUT: vg grid must be strictly increasing with >= 2 points");
    if (!strictly_increasing(vs_)) throw InputError("LUT: vs grid must be strictly increasing with >= 2 points");
    if (id_.size() != vg_.size() * vs_.size() || gmid_.size() != id_.size()) {
      throw InputError("LUT: table size does not match the grid");
    }
    for (double v : id_) {
      if (!(v > 0.0) || !std::isfinite(v)) throw InputError("LUT: current per width must be > 0");
    }
    if (!(length_ > 0.0)) throw InputError("LUT: device length must be > 0");
  }

  static std::pair<std::size_t, double> locate(const std::vector<double>& g, double x) {
    if (x < g.front() || x > g.back()) {
      throw DomainError("LUT lookup outside the grid at " + std::to_string(x) + " V");
    }
    auto hi = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), x) - g.begin());
    hi = std::clamp<std::size_t>(hi, 1, g.size() - 1);
    const std::size_t lo = hi - 1;
    return {lo, (x - g[lo]) / (g[hi] - g[lo])};
  }

  double bilinear(const std::vector<double>& table, double vg, double vs) const {
    const auto [ig, wg] = locate(vg_, vg);
    const auto [is, ws] = locate(vs_, vs);
    const std::size_t ns = vs_.size();
    const double v00 = table[ig * ns + is];
    const double v01 = table[ig * ns + is + 1];
    const double v10 = table[(ig + 1) * ns + is];
    const double v11 = table[(ig + 1) * ns + is + 1];
    return (1.0 - wg) * ((1.0 - ws) * v00 + ws * v01) + wg * ((1.0 - ws) * v10 + ws * v11);
  }

  std::vector<double> vg_;
  std::vector<double> vs_;
  std::vector<double> id_;
  std::vector<double> gmid_;
  std::vector<double> log_id_;
  double length_ = 1e-6;
};

/// Table generated from the ACM equations, for cross-checking the ACM and
/// table-driven sizing routes.
inline DeviceLUT synthesize_acm_lut(const TechProfile& tech, const std::vector<double>& vg,
                                    const std::vector<double>& vs, double length_m,
                                    Temperature t = reference_temperature()) {
  const double u_t = acm::thermal_voltage(t);
  const double vt0 = tech.vt0 + tech.vt0_tempco * (t.kelvin() - tech.t_ref.kelvin());
  const double isq = acm::isq_at(tech, t);
  std::vector<double> id;
  std::vector<double> gmid;
  id.reserve(vg.size() * vs.size());
  gmid.reserve(vg.size() * vs.size());
  for (double g : vg) {
    for (double s : vs) {
      const double i_f = acm::if_of_voltage(((g - vt0) / tech.n - s) / u_t);
      id.push_back(isq * i_f / length_m);
      gmid.push_back(acm::gm_over_id(tech.n, u_t, i_f));
    }
  }
  return DeviceLUT(vg, vs, std::move(id), std::move(gmid), length_m);
}

/// CSV with header vg_v,vs_v,id_per_w_a_per_m,gm_over_id_per_v, vg-major rows.
inline DeviceLUT read_lut_csv(const std::string& path, double length_m) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open LUT file '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw InputError("LUT file '" + path + "' is empty");
  header.erase(std::remove_if(header.begin(), header.end(), [](char c) { return c == ' ' || c == '\r'; }),
               header.end());
  if (header != "vg_v,vs_v,id_per_w_a_per_m,gm_over_id_per_v") {
    throw InputError("LUT file '" + path + "': unexpected header '" + header + "'");
  }
  std::vector<double> vg;
  std::vector<double> vs;
  std::vector<double> id;
  std::vector<double> gmid;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double g = 0.0;
    double s = 0.0;
    double i = 0.0;
    double m = 0.0;
    if (!(ss >> g >> s >> i >> m)) {
      throw InputError("LUT file '" + path + "': bad row at line " + std::to_string(lineno));
    }
    if (vg.empty() || g != vg.back()) {
      if (!vg.empty() && !(g > vg.back())) {
        throw InputError("LUT file '" + path + "': vg not strictly increasing at line " + std::to_string(lineno));
      }
      if (!vg.empty() && id.size() % vs.size() != 0) {
        throw InputError("LUT file '" + path + "': incomplete vs block before line " + std::to_string(lineno));
      }
      vg.push_back(g);
    }
    if (vg.size() == 1) {
      vs.push_back(s);
    } else {
      const std::size_t pos = id.size() % vs.size();
      if (s != vs[pos]) {
        throw InputError("LUT file '" + path + "': vs grid mismatch at line " + std::to_string(lineno));
      }
    }
    id.push_back(i);
    gmid.push_back(m);
  }
  return DeviceLUT(std::move(vg), std::move(vs), std::move(id), std::move(gmid), length_m);
}

}  // namespace scmref
