#pragma once

// The three analyses behind the command-line tool. Each run_* builds its CSV
// documents in memory; nothing touches the file system until write_outputs.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fermikit/bcs.hpp"
#include "fermikit/cli/config.hpp"
#include "fermikit/cli/csv.hpp"
#include "fermikit/errors.hpp"
#include "fermikit/numerics.hpp"
#include "fermikit/parallel.hpp"
#include "fermikit/stability.hpp"
#include "fermikit/trapped_gas.hpp"
#include "fermikit/units.hpp"

namespace fermikit::cli {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunOptions {
  bool metadata = true;  // run metadata comments; off for byte-stable fixtures
};

struct OutputFile {
  std::string path;
  std::string content;
};

/// <dir>/<stem>_r<k><ext> for the k-th (1-based) radius of a stability run.
inline std::string radius_path(const std::string& out, std::size_t k) {
  const std::filesystem::path p(out);
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  return (p.parent_path() / (p.stem().string() + "_r" + std::to_string(k) + ext)).string();
}

namespace detail {

inline void preamble(CsvDocument& doc, const RunConfig& cfg, const RunOptions& opt) {
  doc.comment("fermikit " + to_string(cfg.command));
  if (opt.metadata) {
    doc.comment("meta version=" + std::string(kVersion));
    doc.comment("meta threads=" + std::to_string(thread_count()));
  }
  for (const auto& line : echo_lines(cfg)) doc.comment("input " + line);
}

inline void result(CsvDocument& doc, const std::string& key, const std::string& value) {
  doc.comment("result " + key + "=" + value);
}

inline void result(CsvDocument& doc, const std::string& key, double value) { result(doc, key, format_double(value)); }

inline int positive_count(const RunConfig& cfg, std::string_view key, int minimum) {
  const int v = cfg.integer(key);
  if (v < minimum) throw ConfigError("key '" + std::string(key) + "' must be >= " + std::to_string(minimum));
  return v;
}

inline void temperature_range(const RunConfig& cfg, double& lo, double& hi) {
  lo = cfg.number("T_min");
  hi = cfg.number("T_max");
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("temperature range needs 0 < T_min < T_max");
}

inline trapped_gas::PerturbativeForm parse_form(const std::string& s) {
  if (s == "consistent") return trapped_gas::PerturbativeForm::consistent;
  if (s == "literal") return trapped_gas::PerturbativeForm::literal;
  throw ConfigError("perturbative_form must be consistent or literal");
}

} // namespace detail

inline std::vector<OutputFile> run_density(const RunConfig& cfg, const RunOptions& opt = {}) {
  trapped_gas::TrapParams trap{cfg.number("mass"), cfg.number("omega"), parse_unit_system(cfg.get("units"))};
  trap.validate();
  const double T = cfg.number("T");
  const double v0 = cfg.number("v0");
  const int points = detail::positive_count(cfg, "points", 4);
  const double r_max = cfg.number("r_max");
  if (r_max < 0.0) throw ConfigError("r_max must be >= 0 (0 selects the automatic extent)");
  numerics::SolverConfig solver{cfg.number("abs_tol"), cfg.number("rel_tol"), cfg.integer("max_iter"),
                                cfg.number("damping")};
  solver.validate();
  const auto form = detail::parse_form(cfg.get("perturbative_form"));

  const double mu_ideal = trapped_gas::solve_mu_ideal(cfg.number("N1"), T, trap);
  const trapped_gas::GasState state(T, cfg.number("N1"), cfg.number("N2"), mu_ideal, trap);
  const auto grid = r_max > 0.0 ? trapped_gas::uniform_grid(r_max, static_cast<std::size_t>(points))
                                : trapped_gas::default_grid(state, trap, static_cast<std::size_t>(points));

  const auto sc = trapped_gas::self_consistent_profiles(state, v0, trap, grid, solver);
  const auto z1 = trapped_gas::local_fugacities(sc, 1, v0, T, trap);
  const auto z2 = trapped_gas::local_fugacities(sc, 2, v0, T, trap);
  trapped_gas::GasState at_mu1 = state;
  at_mu1.mu = sc.mu1;

  CsvDocument doc;
  detail::preamble(doc, cfg, opt);
  doc.header({"r", "n_ideal", "n_self_consistent", "n_perturbative", "local_fugacity_1", "local_fugacity_2"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid[k];
    doc.row({format_double(r), format_double(trapped_gas::ideal_density(r, mu_ideal, T, trap)),
             format_double(sc.profile.n1[k]),
             format_double(trapped_gas::perturbative_density(r, at_mu1, v0, trap, form)), format_double(z1[k]),
             format_double(z2[k])});
  }
  detail::result(doc, "mu_ideal", mu_ideal);
  detail::result(doc, "mu1", sc.mu1);
  detail::result(doc, "mu2", sc.mu2);
  detail::result(doc, "iterations", std::to_string(sc.iterations));
  detail::result(doc, "residual", sc.residual);
  detail::result(doc, "central_density_ratio", sc.profile.n1.front() / trapped_gas::ideal_density(0.0, mu_ideal, T, trap));
  detail::result(doc, "weak_coupling", format_bool(sc.weak_coupling));
  return {{cfg.output_path, doc.str()}};
}

namespace detail {

inline void window_footer(CsvDocument& doc, const std::optional<stability::InstabilityWindow>& w) {
  if (!w) {
    result(doc, "T_c1", "none");
    result(doc, "T_c2", "none");
    return;
  }
  result(doc, "T_c1", w->t_c1);
  result(doc, "T_c2", w->t_c2);
  result(doc, "open_below", format_bool(w->open_below));
  result(doc, "open_above", format_bool(w->open_above));
}

inline void report_rows(CsvDocument& doc, const std::vector<double>& temps,
                        const std::vector<stability::StabilityReport>& reports) {
  doc.header({"T", "Z", "diag1", "diag2", "stable"});
  for (std::size_t i = 0; i < temps.size(); ++i) {
    const auto& r = reports[i];
    doc.row({format_double(temps[i]), format_double(r.z_value), format_double(r.diagonal[0]),
             format_double(r.diagonal[1]), format_bool(r.stable)});
  }
}

} // namespace detail

/// Homogeneous scan into cfg.output_path; with radii, one local scan per radius
/// into radius_path(cfg.output_path, k).
inline std::vector<OutputFile> run_stability(const RunConfig& cfg, const RunOptions& opt = {}) {
  const UnitSystem units = parse_unit_system(cfg.get("units"));
  stability::MixtureParams p{cfg.number("a1"), cfg.number("a2"), cfg.number("a12"), cfg.number("rho1"),
                             cfg.number("rho2"), 1.0, cfg.number("mass"), units};
  p.validate();
  trapped_gas::TrapParams trap{p.mass, cfg.number("omega"), units};
  trap.validate();
  double t_lo = 0.0, t_hi = 0.0;
  detail::temperature_range(cfg, t_lo, t_hi);
  const auto points = static_cast<std::size_t>(detail::positive_count(cfg, "points", 2));
  const auto radii = cfg.list("radii");
  for (double r : radii)
    if (!(r >= 0.0)) throw ConfigError("radii must be >= 0");

  const auto temps = numerics::log_spaced(t_lo, t_hi, points);
  std::vector<OutputFile> files;

  auto scan = [&](const std::optional<double>& radius, const std::string& path) {
    std::vector<stability::StabilityReport> reports(temps.size());
    parallel_for(temps.size(), [&](std::size_t i) {
      const auto q = p.at_temperature(temps[i]);
      reports[i] = radius ? stability::local_stability_report(*radius, trap, q) : stability::stability_report(q);
    });
    const auto window = radius ? stability::local_instability_window(p, trap, *radius, t_lo, t_hi, points)
                               : stability::instability_window(p, t_lo, t_hi, points);
    CsvDocument doc;
    detail::preamble(doc, cfg, opt);
    detail::report_rows(doc, temps, reports);
    detail::result(doc, "radius", radius ? format_double(*radius) : std::string("homogeneous"));
    detail::window_footer(doc, window);
    files.push_back({path, doc.str()});
  };

  scan(std::nullopt, cfg.output_path);
  for (std::size_t k = 0; k < radii.size(); ++k) scan(radii[k], radius_path(cfg.output_path, k + 1));
  return files;
}

inline std::vector<OutputFile> run_bcs(const RunConfig& cfg, const RunOptions& opt = {}) {
  bcs::PairingModel model;
  model.hbar_omega = cfg.number("hbar_omega");
  model.mu = cfg.number("mu");
  model.n_max = cfg.integer("n_max");
  model.coupling = cfg.number("coupling");
  model.dos = cfg.number("dos");
  model.window = cfg.number("window");
  model.validate();
  double t_lo = 0.0, t_hi = 0.0;
  detail::temperature_range(cfg, t_lo, t_hi);
  const auto points = static_cast<std::size_t>(detail::positive_count(cfg, "points", 2));

  const auto temps = numerics::log_spaced(t_lo, t_hi, points);
  std::vector<double> gaps(temps.size());
  parallel_for(temps.size(), [&](std::size_t i) { gaps[i] = bcs::solve_gap(temps[i], model); });

  CsvDocument doc;
  detail::preamble(doc, cfg, opt);
  doc.header({"T", "delta"});
  for (std::size_t i = 0; i < temps.size(); ++i) doc.row({format_double(temps[i]), format_double(gaps[i])});

  try {
    detail::result(doc, "T_c_gap", bcs::critical_temperature_from_gap(model));
  } catch (const NoTransition&) {
    detail::result(doc, "T_c_gap", "none");
  }
  try {
    const auto tc = bcs::critical_temperature_discrete(model, bcs::DiscreteTerms::full);
    detail::result(doc, "T_c_discrete", tc.T_c);
    detail::result(doc, "discrete_residual", tc.residual);
    detail::result(doc, "hbar_omega_over_kT_c", tc.hbar_omega_over_kTc);
  } catch (const NoTransition&) {
    detail::result(doc, "T_c_discrete", "none");
  }
  try {
    detail::result(doc, "T_c_first_term", bcs::first_term_closed_form(model));
    detail::result(doc, "T_c_semiclassical", bcs::semiclassical_limit(model));
  } catch (const NoTransition&) {
    detail::result(doc, "T_c_first_term", "none");
    detail::result(doc, "T_c_semiclassical", "none");
  }
  return {{cfg.output_path, doc.str()}};
}

inline std::vector<OutputFile> run(const RunConfig& cfg, const RunOptions& opt = {}) {
  switch (cfg.command) {
    case Command::density: return run_density(cfg, opt);
    case Command::stability: return run_stability(cfg, opt);
    case Command::bcs: return run_bcs(cfg, opt);
  }
  throw ConfigError("unknown command");
}

inline void write_outputs(const std::vector<OutputFile>& files) {
  for (const auto& f : files) write_file(f.path, f.content);
}

/// Exit status: 0 success, 2 configuration or validation error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

} // namespace fermikit::cli
