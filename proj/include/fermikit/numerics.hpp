#pragma once

// Root finding, damped fixed-point iteration and adaptive quadrature shared by
// the physics modules. Everything here is a pure function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "fermikit/errors.hpp"

namespace fermikit::numerics {

struct SolverConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 200;
  double damping = 0.5;

  void validate() const {
    if (!(abs_tol > 0.0)) throw InvalidInput("SolverConfig: abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw InvalidInput("SolverConfig: rel_tol must be > 0");
    if (max_iter < 1) throw InvalidInput("SolverConfig: max_iter must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0))
      throw InvalidInput("SolverConfig: damping must lie in (0, 1]");
  }
};

/// Brent's method (inverse quadratic / secant steps with bisection fallback).
/// Stops when |f(x)| <= abs_tol or the bracket is narrower than rel_tol*|x|.
/// The returned root always lies inside [lo, hi].
template <class F>
double find_root(F&& f, double lo, double hi, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (lo > hi) std::swap(lo, hi);
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (std::isnan(fa) || std::isnan(fb)) throw NumericalError("find_root: f is NaN at a bracket end");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NoBracket(lo, hi, fa, fb);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * cfg.rel_tol * std::abs(b) +
                       std::numeric_limits<double>::min();
    const double m = 0.5 * (c - b);
    if (fb == 0.0 || std::abs(fb) <= cfg.abs_tol || std::abs(m) <= tol) return b;

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if (std::isnan(fb)) throw NumericalError("find_root: f returned NaN");
  }
  throw MaxIterExceeded("find_root: no convergence in " + std::to_string(cfg.max_iter) + " iterations",
                        std::abs(fb), {b});
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct FixedPointResult {
  std::vector<double> x;
  double residual = 0.0;  // ||map(x) - x||_inf at the returned x
  int iterations = 0;     // number of map evaluations
};

/// Damped iteration x <- (1-d) x + d map(x) until
/// ||map(x) - x||_inf <= abs_tol + rel_tol ||x||_inf.
template <class Map>
FixedPointResult fixed_point(Map&& map, std::vector<double> x, const SolverConfig& cfg = {}) {
  cfg.validate();
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidInput("fixed_point: initial iterate is not finite");

  double initial_residual = -1.0;
  double residual = 0.0;
  std::vector<double> mx;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    mx = map(x);
    if (mx.size() != x.size()) throw InvalidInput("fixed_point: map changed the vector length");
    residual = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) residual = std::max(residual, std::abs(mx[i] - x[i]));
    if (std::isnan(residual)) throw Diverged("fixed_point: residual is NaN", residual);
    if (initial_residual < 0.0) initial_residual = residual;

    if (residual <= cfg.abs_tol + cfg.rel_tol * max_abs(x)) return {std::move(x), residual, iter};
    if (residual > 1e6 * initial_residual && initial_residual > 0.0)
      throw Diverged("fixed_point: residual grew beyond 1e6 x its initial value", residual);

    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - cfg.damping) * x[i] + cfg.damping * mx[i];
  }
  throw MaxIterExceeded("fixed_point: no convergence in " + std::to_string(cfg.max_iter) + " iterations",
                        residual, std::move(x));
}

/// Scalar convenience overload.
template <class Map>
double fixed_point_scalar(Map&& map, double init, const SolverConfig& cfg = {}) {
  auto res = fixed_point([&](const std::vector<double>& v) { return std::vector<double>{map(v[0])}; },
                         std::vector<double>{init}, cfg);
  return res.x[0];
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;       // estimated absolute error
  bool converged = false;   // false: ToleranceNotMet, value is the best estimate
  int intervals = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double res_k = fc * kWgk[7];
  double res_g = fc * kWg[3];
  double res_abs = std::abs(res_k);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    res_k += kWgk[j] * (f1[j] + f2[j]);
    res_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_g += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  double err = std::abs((res_k - res_g) * half);
  res_asc *= std::abs(half);
  if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  const double round = 50.0 * std::numeric_limits<double>::epsilon() * res_abs * std::abs(half);
  if (round > std::numeric_limits<double>::min()) err = std::max(err, round);
  return {a, b, res_k * half, err};
}

template <class F>
QuadResult integrate_finite(F& f, double lo, double hi, const SolverConfig& cfg) {
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod_15(f, lo, hi);
  double total = first.value, error = first.error;
  heap.push(first);
  int splits = 0;
  while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (splits >= cfg.max_iter) return {total, error, false, static_cast<int>(heap.size())};
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval cannot be split further
      heap.push(worst);
      return {total, error, false, static_cast<int>(heap.size())};
    }
    Segment left = gauss_kronrod_15(f, worst.a, mid);
    Segment right = gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  double value = 0.0, err = 0.0;
  const int n = static_cast<int>(heap.size());
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, true, n};
}

} // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [lo, hi]. hi may be +infinity,
/// in which case x = lo + t/(1-t) maps the range onto [0, 1).
/// Target: error <= max(abs_tol, rel_tol |result|); cfg.max_iter bounds the bisections.
template <class F>
QuadResult integrate(F&& f, double lo, double hi, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (!std::isfinite(lo)) throw InvalidInput("integrate: lower limit must be finite");
  if (!(lo < hi)) throw InvalidInput("integrate: requires lo < hi");
  if (std::isinf(hi)) {
    auto mapped = [&f, lo](double t) {
      const double one_minus = 1.0 - t;
      return f(lo + t / one_minus) / (one_minus * one_minus);
    };
    return detail::integrate_finite(mapped, 0.0, 1.0, cfg);
  }
  return detail::integrate_finite(f, lo, hi, cfg);
}

/// `points` values geometrically spaced from lo to hi inclusive.
inline std::vector<double> log_spaced(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidInput("log_spaced: need 0 < lo < hi");
  if (points < 2) throw InvalidInput("log_spaced: need at least 2 points");
  std::vector<double> t(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) t[i] = lo * std::exp(step * static_cast<double>(i));
  t.front() = lo;
  t.back() = hi;
  return t;
}

/// 4*pi*Integral r^2 g(r) dr on a uniform grid starting at 0 (composite
/// Simpson; a 3/8 panel absorbs an odd interval count).
inline double radial_simpson(const std::vector<double>& grid, const std::vector<double>& values) {
  const std::size_t n = grid.size();
  if (n < 4 || values.size() != n) throw InvalidInput("radial_simpson: need >= 4 matching samples");
  const double h = grid[1] - grid[0];
  auto g = [&](std::size_t i) { return grid[i] * grid[i] * values[i]; };
  std::size_t intervals = n - 1;
  std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) sum += h / 3.0 * (g(i) + 4.0 * g(i + 1) + g(i + 2));
  if (simpson_end != intervals) {
    const std::size_t i = simpson_end;
    sum += 3.0 * h / 8.0 * (g(i) + 3.0 * g(i + 1) + 3.0 * g(i + 2) + g(i + 3));
  }
  return 4.0 * M_PI * sum;
}

} // namespace fermikit::numerics
