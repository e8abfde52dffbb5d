#pragma once

namespace scmref::constants {

// CODATA 2018 exact SI values.
inline constexpr double boltzmann = 1.380649e-23;       // J/K
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double zero_celsius = 273.15;          // K

/// 25 degC, the reporting temperature.
inline constexpr double t_ref_kelvin = 298.15;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace scmref::constants
