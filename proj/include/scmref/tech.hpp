#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scmref/errors.hpp"
#include "scmref/temperature.hpp"

namespace scmref {

/// One transistor flavor (V_T type) of a technology, e.g. LVT or HVT.
struct DeviceFlavor {
  std::string name;
  double vt0 = 0.4;          // |V_T0| at t_ref [V]
  double vt0_tempco = 0.0;   // d|V_T0|/dT [V/K]
  double isq_ref = 100e-9;   // weak-inversion specific sheet current at t_ref [A]
  double n = 1.2;

  void validate() const {
    if (!(isq_ref > 0.0)) throw DomainError("flavor " + name + ": isq_ref must be > 0");
    if (!(n > 1.0)) throw DomainError("flavor " + name + ": n must be > 1");
  }

  /// Linear threshold law |V_T0|(T) = vt0 + vt0_tempco (T - t_ref).
  double vt0_at(Temperature t, Temperature t_ref) const {
    return vt0 + vt0_tempco * (t.kelvin() - t_ref.kelvin());
  }
};

/// Technology-level constants.
///
/// Two specific-sheet-current definitions coexist: `isq_ref` (and the
/// optional `isq_m1`) use the moderate-inversion form (1/2 mu C'ox n U_T^2)
/// for the self-cascode devices; `isq_weak` and the flavor menu use the
/// weak-inversion form mu C'ox (n-1) U_T^2. Both scale as T^(2-m).
struct TechProfile {
  double n = 1.2;
  double m = 1.25;
  double isq_ref = 100e-9;              // I_SQ of M2 at t_ref [A]
  std::optional<double> isq_m1;         // I_SQ of M1 if different from M2 [A]
  std::optional<double> isq_weak;       // I_SQ for beta-multiplier and mirrors [A]
  Temperature t_ref = reference_temperature();

  double body_factor_linear = 0.165;    // FDSOI back-gate factor [V/V]
  double body_factor_sqrt = 0.4;        // bulk body factor [sqrt(V)]
  double fermi_2phi = 0.8;              // 2 phi_fp at t_ref [V]
  double fermi_2phi_tempco = 0.0;       // d(2 phi_fp)/dT [V/K]

  double vt0 = 0.35;                    // |V_T0| of the core devices at t_ref [V]
  double vt0_tempco = 0.0;              // [V/K]

  std::vector<DeviceFlavor> flavors;

  void validate() const {
    if (!(n > 1.0)) throw DomainError("tech: n must be > 1");
    if (!(m > 0.0 && m < 3.0)) throw DomainError("tech: m must lie in (0, 3)");
    if (!(isq_ref > 0.0)) throw DomainError("tech: isq_ref must be > 0");
    if (isq_m1 && !(*isq_m1 > 0.0)) throw DomainError("tech: isq_m1 must be > 0");
    if (isq_weak && !(*isq_weak > 0.0)) throw DomainError("tech: isq_weak must be > 0");
    if (!(fermi_2phi > 0.0)) throw DomainError("tech: fermi_2phi must be > 0");
    for (const auto& f : flavors) f.validate();
  }

  double isq_m2_ref() const { return isq_ref; }
  double isq_m1_ref() const { return isq_m1.value_or(isq_ref); }
  double isq_weak_ref() const { return isq_weak.value_or(isq_ref); }

  double fermi_2phi_at(Temperature t) const {
    return fermi_2phi + fermi_2phi_tempco * (t.kelvin() - t_ref.kelvin());
  }

  const DeviceFlavor& flavor(const std::string& name) const {
    for (const auto& f : flavors) {
      if (f.name == name) return f;
    }
    throw InputError("unknown device flavor '" + name + "'");
  }
};

}  // namespace scmref
