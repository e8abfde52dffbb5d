#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scmref/errors.hpp"
#include "scmref/temperature.hpp"

namespace scmref {

/// Sampled leakage current vs temperature at one node.
///
/// Interpolated log-linearly in current and linearly in T; clamped to the
/// end samples outside the sampled range.
class LeakageProfile {
 public:
  LeakageProfile() = default;

  LeakageProfile(std::vector<double> t_kelvin, std::vector<double> current)
      : t_(std::move(t_kelvin)), i_(std::move(current)) {
    if (t_.size() != i_.size()) throw InputError("leakage profile: length mismatch");
    for (std::size_t k = 0; k < t_.size(); ++k) {
      if (!(i_[k] >= 0.0)) throw InputError("leakage profile: currents must be >= 0");
      if (k > 0 && !(t_[k] > t_[k - 1])) {
        throw InputError("leakage profile: temperatures must be strictly increasing");
      }
    }
  }

  bool empty() const noexcept { return t_.empty(); }
  const std::vector<double>& temperatures() const noexcept { return t_; }
  const std::vector<double>& currents() const noexcept { return i_; }

  double at(Temperature t) const {
    if (t_.empty()) return 0.0;
    const double x = t.kelvin();
    if (x <= t_.front()) return i_.front();
    if (x >= t_.back()) return i_.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), x) - t_.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - t_[lo]) / (t_[hi] - t_[lo]);
    if (i_[lo] > 0.0 && i_[hi] > 0.0) {
      return std::exp(std::log(i_[lo]) + w * (std::log(i_[hi]) - std::log(i_[lo])));
    }
    return i_[lo] + w * (i_[hi] - i_[lo]);
  }

  LeakageProfile scaled(double factor) const {
    LeakageProfile out = *this;
    for (auto& v : out.i_) v *= factor;
    return out;
  }

 private:
  std::vector<double> t_;
  std::vector<double> i_;
};

/// Leakage drawn from the V_X node and from the V_B6 node.
struct LeakagePerturbation {
  LeakageProfile vx;
  LeakageProfile vb6;

  LeakagePerturbation scaled(double factor) const { return {vx.scaled(factor), vb6.scaled(factor)}; }
};

/// Reads a two-column CSV (temperature_c, current_a) with a header row.
inline LeakageProfile read_leakage_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open leakage file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("leakage file '" + path + "' is empty");
  std::vector<double> t;
  std::vector<double> cur;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double tc = 0.0;
    double ia = 0.0;
    if (!(ss >> tc >> ia)) {
      throw InputError("leakage file '" + path + "': bad row at line " + std::to_string(lineno));
    }
    t.push_back(Temperature::celsius(tc).kelvin());
    cur.push_back(ia);
  }
  return LeakageProfile(std::move(t), std::move(cur));
}

}  // namespace scmref
