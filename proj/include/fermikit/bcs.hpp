#pragma once

// Pairing in the discrete spectrum of an isotropic 3D harmonic trap.
//
// Shell n has energy hbar w (n + 3/2) and degeneracy (n+1)(n+2)/2. With a
// constant pairing matrix element g (the attraction strength |v0|) the gap
// equation over shells measured from the Fermi level, eps_n = hbar w (n + 3/2) - mu, is
//
//   sum_n d_n g tanh(E_n / 2T) / E_n = 1,   E_n = sqrt(eps_n^2 + Delta^2).
//
// A constant g makes the shell sum grow without bound in n_max, so pairing is
// restricted to |eps_n| <= window; n_max only bounds the enumeration.
// Temperatures are in energy units (k_B = 1).

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fermikit/errors.hpp"
#include "fermikit/numerics.hpp"

namespace fermikit::bcs {

struct PairingModel {
  double hbar_omega = 1.0;  // level spacing
  double mu = 0.0;          // Fermi level
  int n_max = 1;            // highest shell enumerated
  double coupling = 0.0;    // g = |v0| >= 0, attraction strength per level pair
  double dos = 0.0;         // N(0), states per energy at the Fermi surface
  double window = std::numeric_limits<double>::infinity();  // pairing shell |eps| <= window

  void validate() const {
    if (!(hbar_omega > 0.0)) throw NonPositiveInput("PairingModel: hbar_omega must be > 0");
    if (n_max < 0) throw InvalidInput("PairingModel: n_max must be >= 0");
    if (!(coupling >= 0.0) || !std::isfinite(coupling))
      throw InvalidInput("PairingModel: coupling is the attraction strength and must be finite and >= 0");
    if (!(dos >= 0.0) || !std::isfinite(dos)) throw InvalidInput("PairingModel: dos must be finite and >= 0");
    if (!(window > 0.0)) throw NonPositiveInput("PairingModel: window must be > 0");
    if (!std::isfinite(mu)) throw InvalidInput("PairingModel: mu must be finite");
  }

  /// B = 3 / (2 (hbar w)^2).
  double B() const { return 1.5 / (hbar_omega * hbar_omega); }
  /// Dimensionless weak-coupling constant v0 N(0).
  double v0_dos() const { return coupling * dos; }
};

struct Level {
  int n;
  double energy;      // hbar w (n + 3/2) - mu
  double degeneracy;  // (n+1)(n+2)/2
};

using Spectrum = std::vector<Level>;

inline double shell_degeneracy(int n) { return 0.5 * (n + 1.0) * (n + 2.0); }

inline Spectrum build_spectrum(const PairingModel& model) {
  model.validate();
  Spectrum levels;
  levels.reserve(static_cast<std::size_t>(model.n_max) + 1);
  for (int n = 0; n <= model.n_max; ++n)
    levels.push_back({n, model.hbar_omega * (n + 1.5) - model.mu, shell_degeneracy(n)});
  return levels;
}

struct BogoliubovAmplitudes {
  double u2;
  double v2;
  double E;
};

/// |v|^2 = (1 - eps/E)/2, |u|^2 = 1 - |v|^2, E = sqrt(eps^2 + delta^2).
inline BogoliubovAmplitudes bogoliubov_amplitudes(double eps, double delta) {
  if (delta < 0.0) throw InvalidInput("bogoliubov_amplitudes: delta must be >= 0");
  if (eps == 0.0 && delta == 0.0) throw DegeneratePoint("bogoliubov_amplitudes: eps = delta = 0");
  const double E = std::hypot(eps, delta);
  const double v2 = 0.5 * (1.0 - eps / E);
  return {1.0 - v2, v2, E};
}

namespace detail {

/// tanh(E / 2T) / E, continued to 1/(2T) at E = 0.
inline double pair_kernel(double E, double T) {
  const double x = E / (2.0 * T);
  if (x < 1e-8) return 1.0 / (2.0 * T);
  return std::tanh(x) / E;
}

} // namespace detail

/// sum_n d_n g tanh(E_n / 2T) / E_n - 1 over shells inside the pairing window.
/// Strictly decreasing in delta and in T whenever any shell contributes.
inline double gap_residual(double delta, double T, const PairingModel& model) {
  model.validate();
  if (!(delta >= 0.0)) throw InvalidInput("gap_residual: delta must be >= 0");
  if (!(T > 0.0)) throw NonPositiveInput("gap_residual: T must be > 0");
  double sum = 0.0;
  for (int n = 0; n <= model.n_max; ++n) {
    const double eps = model.hbar_omega * (n + 1.5) - model.mu;
    if (std::abs(eps) > model.window) continue;
    sum += shell_degeneracy(n) * detail::pair_kernel(std::hypot(eps, delta), T);
  }
  return model.coupling * sum - 1.0;
}

/// Total degeneracy-weighted coupling of the pairing shell, an upper bound for Delta.
inline double pairing_weight(const PairingModel& model) {
  double w = 0.0;
  for (int n = 0; n <= model.n_max; ++n)
    if (std::abs(model.hbar_omega * (n + 1.5) - model.mu) <= model.window) w += shell_degeneracy(n);
  return model.coupling * w;
}

inline numerics::SolverConfig tight_config() {
  numerics::SolverConfig cfg;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-15;
  cfg.max_iter = 400;
  return cfg;
}

/// Order parameter Delta(T); zero when the gap equation has no positive root.
inline double solve_gap(double T, const PairingModel& model) {
  if (gap_residual(0.0, T, model) <= 0.0) return 0.0;
  // The residual is below -1 + g sum d_n / Delta, negative past Delta = g sum d_n.
  const double hi = pairing_weight(model) * (1.0 + 1e-12) + std::numeric_limits<double>::min();
  return numerics::find_root([&](double d) { return gap_residual(d, T, model); }, 0.0, hi, tight_config());
}

/// Probed temperature range for transitions, in units of hbar w.
inline constexpr double kTcScanLow = 1e-6;
inline constexpr double kTcScanHigh = 1e3;

/// Temperature where the linearized (Delta -> 0) gap equation is satisfied.
inline double critical_temperature_from_gap(const PairingModel& model) {
  model.validate();
  const double t_lo = kTcScanLow * model.hbar_omega;
  const double t_hi = kTcScanHigh * model.hbar_omega;
  auto g = [&](double log_t) { return gap_residual(0.0, std::exp(log_t), model); };
  if (g(std::log(t_lo)) <= 0.0 || g(std::log(t_hi)) >= 0.0)
    throw NoTransition("critical_temperature_from_gap: no sign change of the linearized gap equation in [1e-6, 1e3] hbar w");
  return std::exp(numerics::find_root(g, std::log(t_lo), std::log(t_hi), tight_config()));
}

enum class DiscreteTerms {
  full,        // weak-coupling logarithm plus discrete-level corrections
  first_term,  // v0 N(0) ln(1.13 hbar w / T) only
};

/// Right-hand side of the discrete-level T_c condition
///   1 = v0N(0) ln(1.13 hbar w / T) + v0 B T [ e^x/(1+e^x) - 1/2 - ln(1+e^x) + ln 2 ],  x = hbar w / T.
inline double discrete_tc_rhs(double T, const PairingModel& model, DiscreteTerms terms = DiscreteTerms::full) {
  if (!(T > 0.0)) throw NonPositiveInput("discrete_tc_rhs: T must be > 0");
  const double x = model.hbar_omega / T;
  double rhs = model.v0_dos() * std::log(1.13 * x);
  if (terms == DiscreteTerms::full) {
    const double logistic = 1.0 / (1.0 + std::exp(-x));
    const double softplus = x + std::log1p(std::exp(-x));
    rhs += model.coupling * model.B() * T * (logistic - 0.5 - softplus + std::log(2.0));
  }
  return rhs;
}

struct CriticalTemperature {
  double T_c = 0.0;
  double residual = 0.0;          // discrete_tc_rhs(T_c) - 1
  double hbar_omega_over_kTc = 0.0;
};

/// Highest temperature with discrete_tc_rhs = 1 in [1e-6, 1e3] hbar w (400-point log
/// scan, Brent refinement in ln T).
inline CriticalTemperature critical_temperature_discrete(const PairingModel& model, DiscreteTerms terms = DiscreteTerms::full) {
  model.validate();
  if (model.v0_dos() <= 0.0) throw NoTransition("critical_temperature_discrete: v0 N(0) must be > 0");
  const auto temps = numerics::log_spaced(kTcScanLow * model.hbar_omega, kTcScanHigh * model.hbar_omega, 400);
  auto f = [&](double log_t) { return discrete_tc_rhs(std::exp(log_t), model, terms) - 1.0; };
  for (std::size_t i = temps.size() - 1; i > 0; --i) {
    const double a = std::log(temps[i - 1]), b = std::log(temps[i]);
    const double fa = f(a), fb = f(b);
    if ((fa > 0.0) != (fb > 0.0) || fb == 0.0) {
      numerics::SolverConfig cfg = tight_config();
      cfg.abs_tol = 1e-14;
      const double T_c = std::exp(numerics::find_root(f, a, b, cfg));
      return {T_c, discrete_tc_rhs(T_c, model, terms) - 1.0, model.hbar_omega / T_c};
    }
  }
  throw NoTransition("critical_temperature_discrete: no crossing in [1e-6, 1e3] hbar w");
}

/// Algebraic root of the first term alone: T = 1.13 hbar w exp(-1 / v0N(0)).
inline double first_term_closed_form(const PairingModel& model) {
  if (model.v0_dos() <= 0.0) throw NoTransition("first_term_closed_form: v0 N(0) must be > 0");
  return 1.13 * model.hbar_omega * std::exp(-1.0 / model.v0_dos());
}

/// Semiclassical limit quoted without the 1.13 factor: T = hbar w exp(-1 / v0N(0)).
inline double semiclassical_limit(const PairingModel& model) {
  if (model.v0_dos() <= 0.0) throw NoTransition("semiclassical_limit: v0 N(0) must be > 0");
  return model.hbar_omega * std::exp(-1.0 / model.v0_dos());
}

} // namespace fermikit::bcs
