#pragma once

// Mechanical stability of a homogeneous two-component Fermi mixture with
// mean-field couplings a1, a2 (intra-component) and a12 (inter-component):
//
//   beta mu_i = ln z_i + 4 a_i rho_i lambda_i^2 + a12 (lambda_1^2 + lambda_2^2) rho_j
//
// with rho_i lambda_i^3 = f_{3/2}(z_i). The mixture is stable iff the matrix
// d mu_i / d rho_j is positive semidefinite, which reduces to
//
//   A_i = 4 a_i lambda_i^2 + lambda_i^3 / f_{1/2}(z_i) >= 0
//   Z   = A_1 A_2 - a12^2 (lambda_1^2 + lambda_2^2)^2  >= 0.
//
// The trapped gas is treated locally, with z_i -> z_i exp(-beta m w^2 r^2 / 2).

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "fermikit/errors.hpp"
#include "fermikit/fermi_functions.hpp"
#include "fermikit/numerics.hpp"
#include "fermikit/parallel.hpp"
#include "fermikit/trapped_gas.hpp"
#include "fermikit/units.hpp"

namespace fermikit::stability {

struct MixtureParams {
  double a1 = 0.0;
  double a2 = 0.0;
  double a12 = 0.0;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double T = 1.0;
  double mass = 1.0;
  UnitSystem units = UnitSystem::natural;

  void validate() const {
    if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw NonPositiveInput("MixtureParams: densities must be > 0");
    if (!(T > 0.0)) throw NonPositiveInput("MixtureParams: T must be > 0");
    if (!(mass > 0.0)) throw NonPositiveInput("MixtureParams: mass must be > 0");
    if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(a12))
      throw InvalidInput("MixtureParams: couplings must be finite");
  }

  MixtureParams at_temperature(double t) const {
    MixtureParams p = *this;
    p.T = t;
    return p;
  }
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct ChemicalPotentials {
  double mu1;
  double mu2;
};

struct StabilityReport {
  double z_raw = 0.0;    // Z in the active unit system (length^6)
  double z_value = 0.0;  // Z / lambda^6, lambda the thermal wavelength at T
  std::array<double, 2> diagonal{};     // d mu_i / d rho_i
  bool diag1_ok = false;
  bool diag2_ok = false;
  bool stable = false;
  std::array<double, 2> eigenvalues{};  // of d mu_i / d rho_j, ascending
};

namespace detail {

struct Component {
  double lambda;
  double eta;  // ln of the (possibly local) fugacity
};

/// Thermal wavelength and fugacity of each component. `potential_shift` is
/// beta V(r) for the local variant.
inline std::array<Component, 2> components(const MixtureParams& p, double potential_shift = 0.0) {
  p.validate();
  const double lambda = thermal_wavelength(p.mass, p.T, p.units);
  const double l3 = lambda * lambda * lambda;
  return {Component{lambda, inverse_fermi_dirac_eta(FdOrder::three_halves, p.rho1 * l3) - potential_shift},
          Component{lambda, inverse_fermi_dirac_eta(FdOrder::three_halves, p.rho2 * l3) - potential_shift}};
}

/// Diagonal block A_i = 4 a_i lambda^2 + lambda^3 / f_{1/2}(z_i) (= beta d mu_i / d rho_i).
inline double diagonal(double a, const Component& c) {
  const double f = fermi_dirac_eta(FdOrder::half, c.eta);
  const double l = c.lambda;
  const double ideal = f > 0.0 ? l * l * l / f : std::numeric_limits<double>::infinity();
  return 4.0 * a * l * l + ideal;
}

inline double off_diagonal(const MixtureParams& p, const std::array<Component, 2>& c) {
  return p.a12 * (c[0].lambda * c[0].lambda + c[1].lambda * c[1].lambda);
}

inline double z_of(const MixtureParams& p, const std::array<Component, 2>& c) {
  const double off = off_diagonal(p, c);
  return diagonal(p.a1, c[0]) * diagonal(p.a2, c[1]) - off * off;
}

/// Z / (lambda_1^2 lambda_2^2): same sign as Z without the lambda^4 dynamic range.
inline double reduced_z(const MixtureParams& p, const std::array<Component, 2>& c) {
  const double s1 = c[0].lambda * c[0].lambda;
  const double s2 = c[1].lambda * c[1].lambda;
  const double d1 = diagonal(p.a1, c[0]) / s1;
  const double d2 = diagonal(p.a2, c[1]) / s2;
  const double off = p.a12 * (s1 + s2);
  return d1 * d2 - off * off / (s1 * s2);
}

inline StabilityReport report_of(const MixtureParams& p, const std::array<Component, 2>& c) {
  const double kT = constants(p.units).k_B * p.T;
  const double d1 = diagonal(p.a1, c[0]);
  const double d2 = diagonal(p.a2, c[1]);
  const double off = off_diagonal(p, c);
  StabilityReport r;
  r.z_raw = d1 * d2 - off * off;
  const double l = c[0].lambda;
  r.z_value = r.z_raw / (l * l * l * l * l * l);
  r.diagonal = {kT * d1, kT * d2};
  r.diag1_ok = d1 >= 0.0;
  r.diag2_ok = d2 >= 0.0;
  r.stable = r.diag1_ok && r.diag2_ok && r.z_raw >= 0.0;
  const double mean = 0.5 * (d1 + d2);
  const double spread = std::hypot(0.5 * (d1 - d2), off);
  r.eigenvalues = {kT * (mean - spread), kT * (mean + spread)};
  return r;
}

} // namespace detail

/// Interacting chemical potentials; mu_i^0 from inverting rho_i lambda_i^3 = f_{3/2}(z_i).
inline ChemicalPotentials chemical_potentials(const MixtureParams& p) {
  const auto c = detail::components(p);
  const double kT = constants(p.units).k_B * p.T;
  const double l1s = c[0].lambda * c[0].lambda;
  const double l2s = c[1].lambda * c[1].lambda;
  const double beta_mu1 = c[0].eta + 4.0 * p.a1 * p.rho1 * l1s + p.a12 * (l1s + l2s) * p.rho2;
  const double beta_mu2 = c[1].eta + 4.0 * p.a2 * p.rho2 * l2s + p.a12 * (l1s + l2s) * p.rho1;
  return {kT * beta_mu1, kT * beta_mu2};
}

/// d mu_i / d rho_j (energy x volume).
inline Matrix2 stability_matrix(const MixtureParams& p) {
  const auto c = detail::components(p);
  const double kT = constants(p.units).k_B * p.T;
  const double off = kT * detail::off_diagonal(p, c);
  return {{{kT * detail::diagonal(p.a1, c[0]), off}, {off, kT * detail::diagonal(p.a2, c[1])}}};
}

/// Determinant criterion Z(T, a12) in length^6; Z >= 0 is required for stability.
inline double z_function(const MixtureParams& p) { return detail::z_of(p, detail::components(p)); }

inline StabilityReport stability_report(const MixtureParams& p) {
  return detail::report_of(p, detail::components(p));
}

/// Z with the central fugacities replaced by z_i exp(-beta m w^2 r^2 / 2).
/// p.rho1, p.rho2 are the central densities.
inline double local_z_function(double r, const trapped_gas::TrapParams& trap, const MixtureParams& p) {
  trap.validate();
  if (!(r >= 0.0)) throw InvalidInput("local_z_function: r must be >= 0");
  const double shift = trap.potential(r) / (constants(p.units).k_B * p.T);
  return detail::z_of(p, detail::components(p, shift));
}

inline StabilityReport local_stability_report(double r, const trapped_gas::TrapParams& trap, const MixtureParams& p) {
  trap.validate();
  if (!(r >= 0.0)) throw InvalidInput("local_stability_report: r must be >= 0");
  const double shift = trap.potential(r) / (constants(p.units).k_B * p.T);
  return detail::report_of(p, detail::components(p, shift));
}

struct InstabilityWindow {
  double t_c1 = 0.0;
  double t_c2 = 0.0;
  bool open_below = false;  // Z < 0 already at the lower scan bound; t_c1 is that bound
  bool open_above = false;  // Z < 0 still at the upper scan bound; t_c2 is that bound

  bool strictly_inside(const InstabilityWindow& outer) const {
    return t_c1 > outer.t_c1 && t_c2 < outer.t_c2;
  }
};

namespace detail {

template <class ReducedZ>
std::optional<InstabilityWindow> scan_window(ReducedZ&& reduced, double t_lo, double t_hi, std::size_t points) {
  const auto temps = numerics::log_spaced(t_lo, t_hi, points);
  std::vector<double> values(temps.size());
  parallel_for(temps.size(), [&](std::size_t i) { values[i] = reduced(temps[i]); });

  std::size_t first = values.size(), last = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) {
      if (first == values.size()) first = i;
      last = i;
    }
  }
  if (first == values.size()) return std::nullopt;

  numerics::SolverConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-13;
  auto in_log = [&](double log_t) { return reduced(std::exp(log_t)); };
  InstabilityWindow w;
  if (first == 0) {
    w.t_c1 = t_lo;
    w.open_below = true;
  } else {
    w.t_c1 = std::exp(numerics::find_root(in_log, std::log(temps[first - 1]), std::log(temps[first]), cfg));
  }
  if (last == values.size() - 1) {
    w.t_c2 = t_hi;
    w.open_above = true;
  } else {
    w.t_c2 = std::exp(numerics::find_root(in_log, std::log(temps[last]), std::log(temps[last + 1]), cfg));
  }
  return w;
}

} // namespace detail

/// Temperatures between which Z < 0, from a log-spaced scan of [t_lo, t_hi]
/// refined by Brent's method. Densities and couplings of p are held fixed; p.T
/// is ignored. Returns nullopt when Z >= 0 at every scan point.
inline std::optional<InstabilityWindow> instability_window(const MixtureParams& p, double t_lo, double t_hi,
                                                           std::size_t points = 256) {
  p.validate();
  return detail::scan_window(
      [&](double t) {
        const auto q = p.at_temperature(t);
        return detail::reduced_z(q, detail::components(q));
      },
      t_lo, t_hi, points);
}

/// Instability window of the local mixture at radius r of the trap.
inline std::optional<InstabilityWindow> local_instability_window(const MixtureParams& p,
                                                                 const trapped_gas::TrapParams& trap, double r,
                                                                 double t_lo, double t_hi, std::size_t points = 256) {
  p.validate();
  trap.validate();
  if (!(r >= 0.0)) throw InvalidInput("local_instability_window: r must be >= 0");
  return detail::scan_window(
      [&](double t) {
        const auto q = p.at_temperature(t);
        const double shift = trap.potential(r) / (constants(q.units).k_B * t);
        return detail::reduced_z(q, detail::components(q, shift));
      },
      t_lo, t_hi, points);
}

} // namespace fermikit::stability
