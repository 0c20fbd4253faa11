// Acceptance run: one PASS/FAIL line per criterion, indented detail lines
// beneath. Exit status is nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fermikit/bcs.hpp"
#include "fermikit/cli/commands.hpp"
#include "fermikit/fermi_functions.hpp"
#include "fermikit/stability.hpp"
#include "fermikit/trapped_gas.hpp"

namespace fs = std::filesystem;
using namespace fermikit;

namespace {

class Check {
public:
  void expect(bool ok, const std::string& what) {
    std::printf("    [%s] %s\n", ok ? "ok" : "!!", what.c_str());
    all_ &= ok;
  }
  void note(const std::string& what) { std::printf("    [..] %s\n", what.c_str()); }
  bool passed() const { return all_; }

private:
  bool all_ = true;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<void(Check&)> body;
};

const std::vector<FdOrder> kOrders = {FdOrder::half, FdOrder::one, FdOrder::three_halves,
                                      FdOrder::two, FdOrder::five_halves, FdOrder::three};

// Alternating series sum_k (-1)^{k+1} z^k / k^n, accelerated by repeated
// averaging of consecutive partial sums.
double alternating_series_oracle(double n, double z) {
  std::vector<double> partial;
  double s = 0.0, zk = 1.0;
  for (int k = 1; k <= 60; ++k) {
    zk *= z;
    s += ((k % 2) ? 1.0 : -1.0) * zk / std::pow(k, n);
    partial.push_back(s);
  }
  while (partial.size() > 1) {
    for (std::size_t i = 0; i + 1 < partial.size(); ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
    partial.pop_back();
  }
  return partial.front();
}

void special_functions(Check& c) {
  const double value = fermi_dirac(FdOrder::three_halves, 1.0);
  const double oracle = alternating_series_oracle(1.5, 1.0);
  c.expect(std::abs(oracle - 0.7651470246) < 5e-11, fmt("oracle series f_3/2(1) = %.12f", oracle));
  c.expect(std::abs(value - oracle) < 1e-10, fmt("f_3/2(1) = %.12f, |diff| = %.2e", value, std::abs(value - oracle)));

  double worst_low = 0.0, worst_high = 0.0;
  for (FdOrder o : kOrders) {
    if (o == FdOrder::one) continue;  // closed form in every regime
    const double n = order_value(o);
    for (double z = 0.5; z <= 0.99; z += 0.01)
      worst_low = std::max(worst_low, std::abs(fd::quadrature(n, std::log(z)) / fd::series(n, z) - 1.0));
    for (double x = 20.0; x <= 45.0; x += 0.25)
      worst_high = std::max(worst_high, std::abs(fd::sommerfeld(n, x) / fd::quadrature(n, x) - 1.0));
  }
  c.expect(worst_low < 1e-9, fmt("series vs quadrature, z in [0.5, 0.99]: max rel diff %.2e", worst_low));
  c.expect(worst_high < 1e-9, fmt("quadrature vs Sommerfeld, ln z in [20, 45]: max rel diff %.2e", worst_high));

  double worst_rec = 0.0;
  const double h = 1e-4;
  for (FdOrder o : {FdOrder::three_halves, FdOrder::two, FdOrder::five_halves, FdOrder::three}) {
    for (double eta = -10.0; eta <= 60.0; eta += 0.7) {
      const double d = (fermi_dirac_eta(o, eta + h) - fermi_dirac_eta(o, eta - h)) / (2.0 * h);
      worst_rec = std::max(worst_rec, std::abs(d / fermi_dirac_eta(lower_order(o), eta) - 1.0));
    }
  }
  c.expect(worst_rec < 1e-6, fmt("z f_n' = f_{n-1} by central differences: max rel diff %.2e", worst_rec));
}

void ideal_trapped_gas(Check& c) {
  trapped_gas::TrapParams trap;
  numerics::SolverConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-300;
  cfg.max_iter = 2000;
  double worst_closed = 0.0, worst_radial = 0.0;
  for (double N : {1e2, 1e4, 1e6}) {
    for (double bhw : {0.01, 0.1}) {
      const double T = 1.0 / bhw;
      const double mu = trapped_gas::solve_mu_ideal(N, T, trap);
      worst_closed = std::max(worst_closed, std::abs(trapped_gas::trap_particle_number(mu, T, trap) / N - 1.0));
      worst_radial = std::max(worst_radial, std::abs(trapped_gas::radial_particle_number(mu, T, trap, cfg).value / N - 1.0));
    }
  }
  c.expect(worst_closed < 1e-8, fmt("closed-form (kT/hw)^3 f_3 normalization: max rel err %.2e", worst_closed));
  c.expect(worst_radial < 1e-8, fmt("radial-integral normalization: max rel err %.2e", worst_radial));
  for (double N : {1e2, 1e4, 1e6}) {
    const double e_f = std::cbrt(6.0 * N);
    const double mu = trapped_gas::solve_mu_ideal(N, e_f / 50.0, trap);
    c.expect(std::abs(mu / e_f - 1.0) < 0.01, fmt("N=%.0e, beta E_F=50: mu / hw(6N)^1/3 = %.5f", N, mu / e_f));
  }
}

void interacting_profiles(Check& c) {
  trapped_gas::TrapParams trap;
  const double T = 50.0;
  const trapped_gas::GasState state(T, 1e4, 1e4, trapped_gas::solve_mu_ideal(1e4, T, trap), trap);
  const auto grid = trapped_gas::default_grid(state, trap);
  numerics::SolverConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.rel_tol = 1e-13;
  cfg.max_iter = 1000;
  const double n_ideal = trapped_gas::ideal_density(0.0, state.mu, T, trap);

  auto solve = [&](double v0) { return trapped_gas::self_consistent_profiles(state, v0, trap, grid, cfg); };
  auto error_vs_first_order = [&](const trapped_gas::SelfConsistentResult& sc, double v0) {
    trapped_gas::GasState at_mu = state;
    at_mu.mu = sc.mu1;
    double e = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      e = std::max(e, std::abs(sc.profile.n1[k] - trapped_gas::perturbative_density(grid[k], at_mu, v0, trap)));
    return e;
  };

  for (double v0 : {-1.0, 1.0}) {
    const auto full = solve(v0);
    const auto half = solve(0.5 * v0);
    const double n0 = full.profile.n1.front();
    const bool sign_ok = v0 < 0.0 ? n0 > n_ideal : n0 < n_ideal;
    c.expect(sign_ok, fmt("v0=%+.1f: n(0)/n_ideal(0) = %.6f", v0, n0 / n_ideal));
    const double ratio = error_vs_first_order(full, v0) / error_vs_first_order(half, 0.5 * v0);
    c.expect(ratio >= 3.5 && ratio <= 4.5, fmt("v0=%+.1f: |sc - perturbative| shrinks by %.4f when v0 is halved", v0, ratio));
    double worst = 0.0;
    for (const auto* n : {&full.profile.n1, &full.profile.n2, &half.profile.n1, &half.profile.n2})
      worst = std::max(worst, std::abs(numerics::radial_simpson(grid, *n) / 1e4 - 1.0));
    c.expect(worst < 1e-6, fmt("v0=%+.1f: normalization max rel err %.2e", v0, worst));
  }
}

void stability_windows(Check& c) {
  stability::MixtureParams p;
  p.a1 = p.a2 = -0.5;
  const double t_lo = 0.5, t_hi = 100.0;
  auto with = [&](double a12) {
    auto q = p;
    q.a12 = a12;
    return q;
  };
  const auto strong = stability::instability_window(with(0.5), t_lo, t_hi);
  const auto weak = stability::instability_window(with(0.2), t_lo, t_hi);
  c.expect(strong && !strong->open_below && !strong->open_above,
           strong ? fmt("a12=0.5: window [%.6f, %.6f]", strong->t_c1, strong->t_c2) : "a12=0.5: no window");
  c.expect(weak && strong && weak->strictly_inside(*strong),
           weak ? fmt("a12=0.2: window [%.6f, %.6f] strictly inside a12=0.5", weak->t_c1, weak->t_c2)
                : "a12=0.2: no window");

  trapped_gas::TrapParams trap;
  const double r = 1.0;
  const auto local = stability::local_instability_window(with(0.2), trap, r, t_lo, t_hi);
  c.expect(local && weak && local->strictly_inside(*weak),
           local ? fmt("LDA r=%.1f, a12=0.2: window [%.6f, %.6f] strictly inside r=0", r, local->t_c1, local->t_c2)
                 : "LDA: no window");

  std::mt19937_64 rng(20240);
  std::uniform_real_distribution<double> coupling(-1.0, 1.0), log_x(std::log(0.05), std::log(200.0));
  int parity_fail = 0, disagree = 0, marginal = 0;
  for (int i = 0; i < 1000; ++i) {
    stability::MixtureParams q;
    q.a1 = coupling(rng);
    q.a2 = coupling(rng);
    q.a12 = coupling(rng);
    q.rho1 = std::exp(0.5 * log_x(rng));
    q.rho2 = std::exp(0.5 * log_x(rng));
    q.T = std::exp(log_x(rng));
    auto mirrored = q;
    mirrored.a12 = -q.a12;
    if (stability::z_function(q) != stability::z_function(mirrored)) ++parity_fail;
    const auto m = stability::stability_matrix(q);
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double lowest = 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double scale = std::abs(m[0][0]) + std::abs(m[1][1]) + std::abs(m[0][1]);
    if (std::abs(lowest) < 1e-9 * scale) {
      ++marginal;
      continue;
    }
    if (stability::stability_report(q).stable != (lowest > 0.0)) ++disagree;
  }
  c.expect(parity_fail == 0, fmt("Z(a12) == Z(-a12) bitwise on 1000 draws: %.0f mismatches", parity_fail));
  c.expect(disagree == 0, fmt("eigenvalue vs A_i, Z criterion on 1000 draws: %.0f disagreements (%.0f marginal)",
                              disagree, marginal));
}

void pairing(Check& c) {
  using namespace fermikit::bcs;
  PairingModel toy;
  toy.mu = 1.5;
  toy.n_max = 0;
  toy.coupling = 0.8;
  double worst = 0.0;
  for (double T = 0.02; T < 0.4; T += 0.02) {
    double lo = 1e-300, hi = toy.coupling;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid - toy.coupling * std::tanh(mid / (2.0 * T)) < 0.0 ? lo : hi) = mid;
    }
    worst = std::max(worst, std::abs(solve_gap(T, toy) - 0.5 * (lo + hi)));
  }
  c.expect(worst < 1e-8, fmt("single level: max |Delta - tanh oracle| = %.2e", worst));

  PairingModel m;
  m.mu = 20.0;
  m.n_max = 60;
  m.coupling = 0.0015;
  m.dos = 200.0;
  m.window = 5.0;
  const double t_c = critical_temperature_from_gap(m);
  bool monotone = true;
  double prev = INFINITY;
  for (double T : numerics::log_spaced(0.01, 2.0 * t_c, 200)) {
    const double d = solve_gap(T, m);
    monotone &= d <= prev * (1.0 + 1e-12) && (T <= t_c || d == 0.0);
    prev = d;
  }
  c.expect(monotone, "Delta(T) non-increasing and zero above T_c");
  double lo = 0.5 * t_c, hi = 2.0 * t_c;
  for (int i = 0; i < 100; ++i) {
    const double mid = std::sqrt(lo * hi);
    (solve_gap(mid, m) > 0.0 ? lo : hi) = mid;
  }
  c.expect(std::abs(hi / t_c - 1.0) < 1e-4,
           fmt("onset of Delta > 0 at %.10f vs linearized T_c %.10f (rel %.1e)", hi, t_c, std::abs(hi / t_c - 1.0)));

  const auto tc = critical_temperature_discrete(m);
  c.expect(std::abs(tc.residual) < 1e-10, fmt("discrete-level T_c = %.10f, residual %.1e", tc.T_c, tc.residual));

  int grid_points = 0, violations = 0;
  for (double v0n0 : {0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0}) {
    for (double hw : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      PairingModel q = m;
      q.hbar_omega = hw;
      q.dos = v0n0 / q.coupling;
      try {
        const double full = critical_temperature_discrete(q).T_c;
        const double first = critical_temperature_discrete(q, DiscreteTerms::first_term).T_c;
        ++grid_points;
        if (full > first) ++violations;
      } catch (const NoTransition&) {
      }
    }
  }
  c.expect(violations == 0 && grid_points > 0,
           fmt("full T_c <= first-term T_c on %.0f grid points (%.0f violations)", grid_points, violations));

  PairingModel doubled = m;
  doubled.n_max = 2 * m.n_max;
  const double change = std::abs(critical_temperature_from_gap(doubled) / t_c - 1.0);
  c.expect(change < 1e-3, fmt("n_max %.0f -> %.0f with pairing window: T_c change %.1e", m.n_max, doubled.n_max, change));
  PairingModel hard = m;
  hard.window = INFINITY;
  const double hard_60 = critical_temperature_from_gap(hard);
  hard.n_max = 120;
  c.note(fmt("without window (hard cutoff only): T_c = %.4g at n_max 60, %.4g at n_max 120", hard_60,
             critical_temperature_from_gap(hard)));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + FERMIKIT_CLI_PATH + "' " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void command_line(Check& c) {
  const fs::path data = fs::path(FERMIKIT_TEST_DATA_DIR) / "golden";
  const fs::path dir = fs::temp_directory_path() / ("fermikit_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  for (const char* cmd : {"density", "stability", "bcs"}) {
    const std::string conf = (data / (std::string(cmd) + ".conf")).string();
    const fs::path out = dir / (std::string(cmd) + ".csv");
    const int code = run_cli(std::string(cmd) + " --config " + conf + " --out " + out.string() + " --no-metadata");
    bool same = code == 0 && slurp(out) == slurp(data / (std::string(cmd) + ".csv"));
    if (std::string(cmd) == "stability") same &= slurp(dir / "stability_r1.csv") == slurp(data / "stability_r1.csv");
    c.expect(same, std::string(cmd) + ": byte-identical to golden fixture");

    const std::string text = slurp(out);
    const auto original = cli::load_config_file(cli::parse_command(cmd), conf);
    const fs::path again = dir / (std::string(cmd) + "_again.csv");
    const bool equivalent = cli::parse_echo(text).equivalent(original);
    const bool rerun = run_cli(std::string(cmd) + " --config " + out.string() + " --out " + again.string() +
                               " --no-metadata") == 0 &&
                       slurp(again) == text;
    c.expect(equivalent && rerun, std::string(cmd) + ": input echo re-parses to the same config and output");
  }

  const std::string bcs_conf = (data / "bcs.conf").string();
  const std::string out = (dir / "x.csv").string();
  const int invalid = run_cli("bcs --config " + bcs_conf + " --set window=-1 --out " + out);
  const int unknown = run_cli("bcs --config " + bcs_conf + " --set bogus=1 --out " + out);
  const int numerical = run_cli("density --config " + (data / "density.conf").string() + " --set max_iter=2 --out " + out);
  const int no_transition = run_cli("bcs --config " + bcs_conf + " --set coupling=0 --out " + out);
  c.expect(invalid == 2, fmt("invalid value -> exit %.0f (expected 2)", invalid));
  c.expect(unknown == 2, fmt("unknown key -> exit %.0f (expected 2)", unknown));
  c.expect(numerical == 3, fmt("fixed point out of iterations -> exit %.0f (expected 3)", numerical));
  c.expect(no_transition == 0 && slurp(out).find("# result T_c_gap=none") != std::string::npos,
           fmt("no transition -> exit %.0f with 'none' footer (expected 0)", no_transition));
  fs::remove_all(dir);
}

} // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "special functions", 1.0, special_functions},
      {2, "ideal trapped gas", 5.0, ideal_trapped_gas},
      {3, "interacting profiles", 30.0, interacting_profiles},
      {4, "stability windows", 10.0, stability_windows},
      {5, "pairing and T_c", 20.0, pairing},
      {6, "command-line tool", 5.0, command_line},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    std::printf("criterion %d: %s\n", cr.id, cr.title);
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(seconds < cr.budget_seconds, fmt("runtime %.3f s (budget %.0f s)", seconds, cr.budget_seconds));
    std::printf("%s %d %s\n", check.passed() ? "PASS" : "FAIL", cr.id, cr.title);
    if (!check.passed()) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
