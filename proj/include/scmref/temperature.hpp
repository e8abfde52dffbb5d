#pragma once

#include <cmath>
#include <compare>
#include <string>
#include <vector>

#include "scmref/constants.hpp"
#include "scmref/errors.hpp"

namespace scmref {

/// Absolute temperature. Always strictly positive.
class Temperature {
 public:
  static Temperature kelvin(double k) { return Temperature(k); }
  static Temperature celsius(double c) { return Temperature(c + constants::zero_celsius); }

  double kelvin() const noexcept { return kelvin_; }
  double celsius() const noexcept { return kelvin_ - constants::zero_celsius; }

  auto operator<=>(const Temperature&) const = default;

 private:
  explicit Temperature(double k) : kelvin_(k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw DomainError("temperature must be > 0 K, got " + std::to_string(k) + " K");
    }
  }

  double kelvin_;
};

inline Temperature reference_temperature() {
  return Temperature::kelvin(constants::t_ref_kelvin);
}

/// Inclusive grid from start to stop (degC) with the given step.
inline std::vector<Temperature> celsius_grid(double start_c, double stop_c, double step_c) {
  if (!(step_c > 0.0) || !(stop_c > start_c)) {
    throw DomainError("celsius_grid: need step > 0 and stop > start");
  }
  const auto count = static_cast<long>(std::floor((stop_c - start_c) / step_c + 1e-9)) + 1;
  std::vector<Temperature> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    grid.push_back(Temperature::celsius(start_c + static_cast<double>(i) * step_c));
  }
  return grid;
}

/// -40 ... 85 degC in 5 degC steps.
inline std::vector<Temperature> default_temperature_grid() {
  return celsius_grid(-40.0, 85.0, 5.0);
}

inline void require_increasing(const std::vector<Temperature>& grid, const char* what) {
  if (grid.size() < 2) {
    throw DomainError(std::string(what) + ": temperature grid needs at least 2 points");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw DomainError(std::string(what) + ": temperature grid must be strictly increasing");
    }
  }
}

}  // namespace scmref
