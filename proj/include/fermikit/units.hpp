#pragma once

#include <string>
#include <string_view>

#include "fermikit/errors.hpp"

namespace fermikit {

enum class UnitSystem {
  natural,  // hbar = k_B = 1; trap problems usually also set m = omega = 1
  si,
};

struct PhysicalConstants {
  double hbar;
  double k_B;
};

constexpr PhysicalConstants constants(UnitSystem u) {
  if (u == UnitSystem::si) return {1.054571817e-34, 1.380649e-23};
  return {1.0, 1.0};
}

/// Atomic mass unit in kg.
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;

inline UnitSystem parse_unit_system(std::string_view s) {
  if (s == "natural") return UnitSystem::natural;
  if (s == "si") return UnitSystem::si;
  throw InvalidInput("unknown unit system '" + std::string(s) + "' (expected natural or si)");
}

inline std::string to_string(UnitSystem u) { return u == UnitSystem::si ? "si" : "natural"; }

} // namespace fermikit
