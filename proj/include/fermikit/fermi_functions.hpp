#pragma once

// Complete Fermi-Dirac integrals
//
//   f_n(z) = -Li_n(-z) = 1/Gamma(n) Integral_0^inf t^(n-1) / (z^-1 e^t + 1) dt
//
// for the orders used by the trapped-gas, stability and pairing modules.
// Three regimes are stitched together:
//   z <= 0.9          alternating power series
//   0.9 < z < e^30    Gauss-Kronrod quadrature of the integral in s = sqrt(t)
//   z >= e^30         Sommerfeld asymptotic series
// Every routine has an `_eta` twin taking eta = ln z, which is what the
// physics code uses since degenerate gases push z far past double range.

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "fermikit/errors.hpp"
#include "fermikit/numerics.hpp"
#include "fermikit/units.hpp"

namespace fermikit {

enum class FdOrder { half, one, three_halves, two, five_halves, three };

constexpr double order_value(FdOrder n) {
  switch (n) {
    case FdOrder::half: return 0.5;
    case FdOrder::one: return 1.0;
    case FdOrder::three_halves: return 1.5;
    case FdOrder::two: return 2.0;
    case FdOrder::five_halves: return 2.5;
    case FdOrder::three: return 3.0;
  }
  return 0.0;
}

/// Maps a numeric order onto the supported set; anything else is rejected.
inline FdOrder fd_order(double n) {
  for (FdOrder o : {FdOrder::half, FdOrder::one, FdOrder::three_halves, FdOrder::two,
                    FdOrder::five_halves, FdOrder::three})
    if (order_value(o) == n) return o;
  throw UnsupportedOrder("Fermi-Dirac order " + std::to_string(n) +
                         " is not supported (use 1/2, 1, 3/2, 2, 5/2 or 3)");
}

/// Order n-1 within the supported set, so that z d/dz f_n = f_{n-1}.
inline FdOrder lower_order(FdOrder n) {
  switch (n) {
    case FdOrder::three_halves: return FdOrder::half;
    case FdOrder::two: return FdOrder::one;
    case FdOrder::five_halves: return FdOrder::three_halves;
    case FdOrder::three: return FdOrder::two;
    default: throw UnsupportedOrder("lower_order: order has no supported predecessor");
  }
}

namespace fd {

inline const double kSeriesMaxEta = std::log(0.9);
inline constexpr double kSommerfeldMinEta = 30.0;

/// Alternating series sum_k (-1)^(k+1) z^k / k^n. Converges for z <= 1;
/// slowly as z -> 1.
inline double series(double n, double z) {
  if (z == 0.0) return 0.0;
  double sum = 0.0;
  double zk = 1.0;
  for (int k = 1; k < 2000000; ++k) {
    zk *= z;
    const double term = zk / std::pow(static_cast<double>(k), n);
    sum += (k % 2 == 1) ? term : -term;
    if (term <= 1e-17 * sum) break;
  }
  return sum;
}

/// Direct quadrature of the integral definition. With t = s^2 the integrand
/// 2 s^(2n-1) / (e^(s^2 - eta) + 1) is smooth at the origin for n >= 1/2.
inline double quadrature(double n, double eta) {
  const double power = 2.0 * n - 1.0;
  auto integrand = [power, eta](double s) {
    const double u = s * s - eta;
    const double occupation = u > 0.0 ? std::exp(-u) / (1.0 + std::exp(-u)) : 1.0 / (std::exp(u) + 1.0);
    return 2.0 * std::pow(s, power) * occupation;
  };
  numerics::SolverConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-13;  // the Kronrod estimate is pessimistic; realised error is ~1e-15
  cfg.max_iter = 500;
  const double s_max = std::sqrt(std::max(eta, 0.0) + 70.0);
  double total = 0.0;
  if (eta > 1.0) {
    // Split at the Fermi edge, where the occupation drops over a width ~1/sqrt(eta).
    const double edge = std::sqrt(eta);
    total += numerics::integrate(integrand, 0.0, edge, cfg).value;
    total += numerics::integrate(integrand, edge, s_max, cfg).value;
  } else {
    total = numerics::integrate(integrand, 0.0, s_max, cfg).value;
  }
  return total / std::tgamma(n);
}

/// Sommerfeld expansion
///   f_n(e^x) = sum_k 2 (1 - 2^(1-2k)) zeta(2k) x^(n-2k) / Gamma(n+1-2k)  + cos(pi n) f_n(e^-x)
/// summed until the terms stop decreasing. For integer n the sum terminates and
/// the last term makes the identity exact; for half-integer n it vanishes and the
/// truncation error is O(e^-x).
inline double sommerfeld(double n, double x) {
  // 2 (1 - 2^(1-2k)) zeta(2k), k = 0..8
  static constexpr std::array<double, 9> coeff = {
      1.0,
      1.6449340668482264,   // pi^2/6
      1.8940656589944918,   // 7 pi^4/360
      1.9711021825948705,
      1.9924660037052959,
      1.9980790151965429,
      1.9995153702877164,
      1.9998783406919596,
      1.9999695284298122};
  const bool integer_order = (n == std::floor(n));
  double sum = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < coeff.size(); ++k) {
    const double g_arg = n + 1.0 - 2.0 * static_cast<double>(k);
    if (integer_order && g_arg <= 0.0) break;  // 1/Gamma vanishes at the poles
    const double term = coeff[k] * std::pow(x, n - 2.0 * static_cast<double>(k)) / std::tgamma(g_arg);
    if (std::abs(term) > std::abs(previous)) break;  // asymptotic series started to diverge
    sum += term;
    previous = term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  if (integer_order) {
    const double sign = (static_cast<long>(n) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * series(n, std::exp(-x));
  }
  return sum;
}

} // namespace fd

/// f_n(e^eta). eta = -inf gives 0.
inline double fermi_dirac_eta(FdOrder order, double eta) {
  if (std::isnan(eta)) throw InvalidInput("fermi_dirac: eta is NaN");
  if (eta == -std::numeric_limits<double>::infinity()) return 0.0;
  if (eta == std::numeric_limits<double>::infinity()) return eta;
  if (order == FdOrder::one) {
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
  }
  const double n = order_value(order);
  if (eta <= fd::kSeriesMaxEta) return fd::series(n, std::exp(eta));
  if (eta < fd::kSommerfeldMinEta) return fd::quadrature(n, eta);
  return fd::sommerfeld(n, eta);
}

/// f_n(z) for fugacity z >= 0.
inline double fermi_dirac(FdOrder order, double z) {
  if (std::isnan(z)) throw InvalidInput("fermi_dirac: z is NaN");
  if (z < 0.0) throw NegativeFugacity("fermi_dirac: fugacity must be >= 0");
  if (z == 0.0) return 0.0;
  return fermi_dirac_eta(order, std::log(z));
}

/// eta = ln z such that f_n(e^eta) = y. y = 0 maps to -inf.
inline double inverse_fermi_dirac_eta(FdOrder order, double y) {
  if (std::isnan(y) || y < 0.0) throw InvalidInput("inverse_fermi_dirac: target must be >= 0");
  if (y == 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(y)) return y;
  const double n = order_value(order);
  const double log_y = std::log(y);
  // f_n(z) < z gives the lower end; the leading Sommerfeld term bounds from above.
  const double lo = log_y;
  double hi = std::max(log_y + 1.0, std::pow(std::tgamma(n + 1.0) * y, 1.0 / n));
  auto residual = [&](double eta) { return std::log(fermi_dirac_eta(order, eta)) - log_y; };
  for (int grow = 0; residual(hi) < 0.0; ++grow) {
    if (grow > 200) throw NonConvergence("inverse_fermi_dirac: could not bracket the root");
    hi = 2.0 * hi + 1.0;
  }
  numerics::SolverConfig cfg;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-15;
  try {
    return numerics::find_root(residual, lo, hi, cfg);
  } catch (const NumericalError& e) {
    throw NonConvergence(std::string("inverse_fermi_dirac: ") + e.what());
  }
}

inline double inverse_fermi_dirac(FdOrder order, double y) {
  return std::exp(inverse_fermi_dirac_eta(order, y));
}

/// Fugacity z with f_{3/2}(z) = y, i.e. the density-to-fugacity inversion
/// rho lambda^3 = f_{3/2}(z). Overflows to +inf for very degenerate y; use
/// inverse_fermi_dirac_eta there.
inline double inverse_fd_32(double y) { return inverse_fermi_dirac(FdOrder::three_halves, y); }

/// Thermal de Broglie wavelength h / sqrt(2 pi m k_B T).
inline double thermal_wavelength(double mass, double T, UnitSystem units = UnitSystem::natural) {
  if (!(mass > 0.0) || !(T > 0.0)) throw NonPositiveInput("thermal_wavelength: mass and T must be > 0");
  const auto c = constants(units);
  return std::sqrt(2.0 * M_PI * c.hbar * c.hbar / (mass * c.k_B * T));
}

} // namespace fermikit
