#pragma once

// Semiclassical (local-density) thermodynamics of a two-component Fermi gas in
// an isotropic harmonic trap V(r) = m w^2 r^2 / 2 with a contact interaction v0
// between the components:
//
//   n_i(r) = lambda^-3 f_{3/2}(z_i(r)),   z_i(r) = exp(beta (mu_i - v0 n_j(r) - V(r)))
//
// and 4 pi Integral r^2 n_i dr = N_i fixing mu_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "fermikit/errors.hpp"
#include "fermikit/fermi_functions.hpp"
#include "fermikit/numerics.hpp"
#include "fermikit/units.hpp"

namespace fermikit::trapped_gas {

struct TrapParams {
  double mass = 1.0;
  double omega = 1.0;
  UnitSystem units = UnitSystem::natural;

  void validate() const {
    if (!(mass > 0.0)) throw NonPositiveInput("TrapParams: mass must be > 0");
    if (!(omega > 0.0)) throw NonPositiveInput("TrapParams: omega must be > 0");
  }
  double hbar() const { return constants(units).hbar; }
  double k_B() const { return constants(units).k_B; }
  double potential(double r) const { return 0.5 * mass * omega * omega * r * r; }
};

struct GasState {
  double T = 0.0;
  double N1 = 0.0;
  double N2 = 0.0;
  double mu = 0.0;    // common chemical potential (equal populations)
  double beta = 0.0;  // 1 / (k_B T)

  GasState() = default;
  GasState(double T_, double N1_, double N2_, double mu_, const TrapParams& trap)
      : T(T_), N1(N1_), N2(N2_), mu(mu_), beta(1.0 / (trap.k_B() * T_)) {
    if (!(T > 0.0)) throw NonPositiveInput("GasState: T must be > 0");
    if (!(N1 > 0.0) || !(N2 > 0.0)) throw NonPositiveInput("GasState: particle numbers must be > 0");
  }
};

struct RadialProfile {
  std::vector<double> grid;  // uniform, grid[0] == 0
  std::vector<double> n1;
  std::vector<double> n2;
  double r_max = 0.0;
};

inline double wavelength(const TrapParams& trap, double T) {
  return thermal_wavelength(trap.mass, T, trap.units);
}

namespace detail {

inline void check_temperature(double T) {
  if (!(T > 0.0)) throw NonPositiveInput("temperature must be > 0");
}

/// lambda^-3 f_{3/2}(exp(beta (mu - shift - V(r)))). Every density in this
/// module goes through here, so v0 = 0 reproduces the ideal gas bit for bit.
inline double local_density(double r, double mu, double shift, double beta, double inv_lambda3,
                            const TrapParams& trap) {
  const double eta = beta * (mu - shift - trap.potential(r));
  return inv_lambda3 * fermi_dirac_eta(FdOrder::three_halves, eta);
}

} // namespace detail

/// Non-interacting LDA density n0(r) = lambda^-3 f_{3/2}(exp(beta (mu - V(r)))).
inline double ideal_density(double r, double mu, double T, const TrapParams& trap) {
  trap.validate();
  detail::check_temperature(T);
  if (!(r >= 0.0)) throw InvalidInput("ideal_density: r must be >= 0");
  const double lambda = wavelength(trap, T);
  return detail::local_density(r, mu, 0.0, 1.0 / (trap.k_B() * T), 1.0 / (lambda * lambda * lambda), trap);
}

/// Closed-form trap average N = (k_B T / hbar w)^3 f_3(e^{beta mu}).
inline double trap_particle_number(double mu, double T, const TrapParams& trap) {
  trap.validate();
  detail::check_temperature(T);
  const double ratio = trap.k_B() * T / (trap.hbar() * trap.omega);
  return ratio * ratio * ratio * fermi_dirac_eta(FdOrder::three, mu / (trap.k_B() * T));
}

/// Radius beyond which the ideal envelope exp(beta (mu - V)) has dropped by
/// more than 1e-12 relative to the centre.
inline double default_r_max(double mu, double T, const TrapParams& trap) {
  const double kT = trap.k_B() * T;
  const double energy = std::max(mu, 0.0) + 28.0 * kT;
  return std::sqrt(2.0 * energy / (trap.mass * trap.omega * trap.omega));
}

/// 4 pi Integral_0^inf r^2 n0(r) dr by adaptive quadrature (independent of the
/// f_3 closed form).
inline numerics::QuadResult radial_particle_number(double mu, double T, const TrapParams& trap,
                                                   const numerics::SolverConfig& cfg = {}) {
  trap.validate();
  detail::check_temperature(T);
  const double lambda = wavelength(trap, T);
  const double beta = 1.0 / (trap.k_B() * T);
  const double inv_l3 = 1.0 / (lambda * lambda * lambda);
  auto integrand = [&](double r) { return 4.0 * M_PI * r * r * detail::local_density(r, mu, 0.0, beta, inv_l3, trap); };
  // Integrate out to beta (V - mu) = 45, where the tail is far below any tolerance used here.
  const double kT = trap.k_B() * T;
  const double r_end = std::sqrt(2.0 * (std::max(mu, 0.0) + 45.0 * kT) / (trap.mass * trap.omega * trap.omega));
  if (mu > 0.0) {
    const double r_edge = std::sqrt(2.0 * mu / (trap.mass * trap.omega * trap.omega));
    auto inner = numerics::integrate(integrand, 0.0, r_edge, cfg);
    auto outer = numerics::integrate(integrand, r_edge, r_end, cfg);
    return {inner.value + outer.value, inner.error + outer.error, inner.converged && outer.converged,
            inner.intervals + outer.intervals};
  }
  return numerics::integrate(integrand, 0.0, r_end, cfg);
}

/// Chemical potential of N non-interacting atoms of one component.
inline double solve_mu_ideal(double N, double T, const TrapParams& trap) {
  trap.validate();
  detail::check_temperature(T);
  if (!(N > 0.0)) throw NonPositiveInput("solve_mu_ideal: N must be > 0");
  const double kT = trap.k_B() * T;
  const double ratio = trap.hbar() * trap.omega / kT;
  try {
    return kT * inverse_fermi_dirac_eta(FdOrder::three, N * ratio * ratio * ratio);
  } catch (const NumericalError& e) {
    throw NonConvergence(std::string("solve_mu_ideal: ") + e.what());
  }
}

inline std::vector<double> uniform_grid(double r_max, std::size_t points = 512) {
  if (!(r_max > 0.0)) throw NonPositiveInput("uniform_grid: r_max must be > 0");
  if (points < 4) throw InvalidInput("uniform_grid: need at least 4 points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = r_max * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

/// Default 512-point grid sized for the larger of the two ideal clouds.
inline std::vector<double> default_grid(const GasState& state, const TrapParams& trap, std::size_t points = 512) {
  const double mu = solve_mu_ideal(std::max(state.N1, state.N2), state.T, trap);
  return uniform_grid(default_r_max(mu, state.T, trap), points);
}

struct SelfConsistentResult {
  RadialProfile profile;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool weak_coupling = true;  // false: beta |v0| n_peak > 1, outside first-order validity
};

/// Coupled Hartree profiles. Each sweep re-solves mu_i against the normalization
/// with the partner density frozen, then the damped fixed point runs over the
/// stacked (n1, n2) grid values. Starts from the ideal profiles.
inline SelfConsistentResult self_consistent_profiles(const GasState& state, double v0, const TrapParams& trap,
                                                     const std::vector<double>& grid,
                                                     const numerics::SolverConfig& cfg = {}) {
  trap.validate();
  cfg.validate();
  detail::check_temperature(state.T);
  if (!(state.N1 > 0.0) || !(state.N2 > 0.0)) throw NonPositiveInput("self_consistent_profiles: N must be > 0");
  if (!std::isfinite(v0)) throw InvalidInput("self_consistent_profiles: v0 must be finite");
  if (grid.size() < 4 || grid.front() != 0.0) throw InvalidInput("self_consistent_profiles: grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("self_consistent_profiles: grid must be strictly increasing");

  const std::size_t P = grid.size();
  const double kT = trap.k_B() * state.T;
  const double beta = 1.0 / kT;
  const double lambda = wavelength(trap, state.T);
  const double inv_l3 = 1.0 / (lambda * lambda * lambda);

  double mu[2] = {solve_mu_ideal(state.N1, state.T, trap), solve_mu_ideal(state.N2, state.T, trap)};
  const double N[2] = {state.N1, state.N2};

  auto densities = [&](double mu_i, const double* partner) {
    std::vector<double> n(P);
    for (std::size_t k = 0; k < P; ++k)
      n[k] = detail::local_density(grid[k], mu_i, v0 * partner[k], beta, inv_l3, trap);
    return n;
  };

  // Ideal trap integral in closed form plus the grid integral of the
  // interaction-induced change.
  auto particle_number = [&](double mu_i, const double* partner) {
    std::vector<double> diff(P);
    for (std::size_t k = 0; k < P; ++k)
      diff[k] = detail::local_density(grid[k], mu_i, v0 * partner[k], beta, inv_l3, trap) -
                detail::local_density(grid[k], mu_i, 0.0, beta, inv_l3, trap);
    return trap_particle_number(mu_i, state.T, trap) + numerics::radial_simpson(grid, diff);
  };

  auto solve_mu = [&](int i, const double* partner) {
    if (v0 == 0.0) return mu[i];
    auto g = [&](double eta) {
      const double count = particle_number(kT * eta, partner);
      return std::log(std::max(count, 1e-300)) - std::log(N[i]);
    };
    double lo = beta * mu[i] - 0.5, hi = beta * mu[i] + 0.5;
    for (int grow = 0; g(lo) > 0.0; ++grow) {
      if (grow > 60) throw NonConvergence("self_consistent_profiles: cannot bracket mu");
      lo -= (hi - lo);
    }
    for (int grow = 0; g(hi) < 0.0; ++grow) {
      if (grow > 60) throw NonConvergence("self_consistent_profiles: cannot bracket mu");
      hi += (hi - lo);
    }
    numerics::SolverConfig root_cfg;
    root_cfg.abs_tol = 1e-15;
    root_cfg.rel_tol = 1e-15;
    return kT * numerics::find_root(g, lo, hi, root_cfg);
  };

  auto sweep = [&](const std::vector<double>& x) {
    const double* n1 = x.data();
    const double* n2 = x.data() + P;
    mu[0] = solve_mu(0, n2);
    mu[1] = solve_mu(1, n1);
    std::vector<double> out = densities(mu[0], n2);
    std::vector<double> second = densities(mu[1], n1);
    out.insert(out.end(), second.begin(), second.end());
    return out;
  };

  std::vector<double> init = densities(mu[0], std::vector<double>(P, 0.0).data());
  {
    std::vector<double> second = densities(mu[1], std::vector<double>(P, 0.0).data());
    init.insert(init.end(), second.begin(), second.end());
  }

  auto fp = numerics::fixed_point(sweep, std::move(init), cfg);
  // Re-evaluate at the converged iterate so mu and the profiles belong together.
  std::vector<double> final_x = sweep(fp.x);

  SelfConsistentResult result;
  result.profile.grid = grid;
  result.profile.r_max = grid.back();
  result.profile.n1.assign(final_x.begin(), final_x.begin() + static_cast<std::ptrdiff_t>(P));
  result.profile.n2.assign(final_x.begin() + static_cast<std::ptrdiff_t>(P), final_x.end());
  result.mu1 = mu[0];
  result.mu2 = mu[1];
  result.residual = fp.residual;
  result.iterations = fp.iterations;
  const double peak = std::max(result.profile.n1.front(), result.profile.n2.front());
  result.weak_coupling = beta * std::abs(v0) * peak <= 1.0;
  return result;
}

/// Local fugacity exp(beta (mu_i - v0 n_j(r) - V(r))) of a converged solution.
inline std::vector<double> local_fugacities(const SelfConsistentResult& sc, int component, double v0, double T,
                                            const TrapParams& trap) {
  const auto& partner = component == 1 ? sc.profile.n2 : sc.profile.n1;
  const double mu = component == 1 ? sc.mu1 : sc.mu2;
  const double beta = 1.0 / (trap.k_B() * T);
  std::vector<double> z(sc.profile.grid.size());
  for (std::size_t k = 0; k < z.size(); ++k)
    z[k] = std::exp(beta * (mu - v0 * partner[k] - trap.potential(sc.profile.grid[k])));
  return z;
}

enum class PerturbativeForm {
  consistent,  // lambda^-3 [f_{3/2}(z0) - beta v0 n0 f_{1/2}(z0)], the first-order Taylor term
  literal,     // the printed (3/2)(m/2 pi hbar^2)^{3/2} beta^{-5/2} [f_{5/2} - v0 z0^2 f_{3/2} beta n0] form
};

/// First-order expansion in v0 of the interacting density at fixed chemical
/// potential state.mu (both components share z0 = exp(beta (mu - V))).
inline double perturbative_density(double r, const GasState& state, double v0, const TrapParams& trap,
                                   PerturbativeForm form = PerturbativeForm::consistent) {
  trap.validate();
  detail::check_temperature(state.T);
  if (!(r >= 0.0)) throw InvalidInput("perturbative_density: r must be >= 0");
  const double beta = 1.0 / (trap.k_B() * state.T);
  const double eta0 = beta * (state.mu - trap.potential(r));

  if (form == PerturbativeForm::literal) {
    const double hbar = trap.hbar();
    const double prefactor = 1.5 * std::pow(trap.mass / (2.0 * M_PI * hbar * hbar), 1.5) * std::pow(beta, -2.5);
    const double n_b0 = 1.5 * std::pow(trap.mass / (M_PI * hbar * hbar), 1.5) * std::pow(beta, -2.5) *
                        fermi_dirac_eta(FdOrder::five_halves, eta0);
    const double z0 = std::exp(eta0);
    return prefactor * (fermi_dirac_eta(FdOrder::five_halves, eta0) -
                        v0 * z0 * z0 * fermi_dirac_eta(FdOrder::three_halves, eta0) * beta * n_b0);
  }

  const double lambda = wavelength(trap, state.T);
  const double inv_l3 = 1.0 / (lambda * lambda * lambda);
  const double f32 = fermi_dirac_eta(FdOrder::three_halves, eta0);
  const double n0 = inv_l3 * f32;
  return inv_l3 * (f32 - beta * v0 * n0 * fermi_dirac_eta(FdOrder::half, eta0));
}

} // namespace fermikit::trapped_gas
