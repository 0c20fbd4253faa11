#pragma once

// Flat key=value run configuration. Every command has a fixed schema with
// default values; files and --set overrides may only assign schema keys. The
// echo written into each output ("# input key=value") parses back into an equal
// RunConfig, so a CSV file is itself a valid config file.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fermikit/errors.hpp"

namespace fermikit::cli {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

enum class Command { density, stability, bcs };

inline Command parse_command(std::string_view s) {
  if (s == "density") return Command::density;
  if (s == "stability") return Command::stability;
  if (s == "bcs") return Command::bcs;
  throw ConfigError("unknown command '" + std::string(s) + "' (expected density, stability or bcs)");
}

inline std::string to_string(Command c) {
  switch (c) {
    case Command::density: return "density";
    case Command::stability: return "stability";
    case Command::bcs: return "bcs";
  }
  return "";
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Keys accepted by each command, in echo order, with their defaults.
inline const KeyValues& schema(Command c) {
  static const KeyValues density = {
      {"units", "natural"}, {"mass", "1"},        {"omega", "1"},         {"T", "50"},
      {"N1", "10000"},      {"N2", "10000"},      {"v0", "-1"},           {"points", "512"},
      {"r_max", "0"},       {"abs_tol", "1e-12"}, {"rel_tol", "1e-12"},   {"max_iter", "500"},
      {"damping", "0.5"},   {"perturbative_form", "consistent"},
  };
  static const KeyValues stability = {
      {"units", "natural"}, {"mass", "1"},    {"omega", "1"},    {"a1", "-0.5"},  {"a2", "-0.5"},
      {"a12", "0.5"},       {"rho1", "1"},    {"rho2", "1"},     {"T_min", "0.5"}, {"T_max", "100"},
      {"points", "256"},    {"radii", ""},
  };
  static const KeyValues bcs = {
      {"hbar_omega", "1"}, {"mu", "20"},      {"n_max", "60"},   {"coupling", "0.0015"}, {"dos", "200"},
      {"window", "5"},     {"T_min", "0.01"}, {"T_max", "2"},    {"points", "100"},
  };
  switch (c) {
    case Command::density: return density;
    case Command::stability: return stability;
    case Command::bcs: return bcs;
  }
  return density;
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline double parse_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ConfigError("key '" + std::string(key) + "': '" + s + "' is not a finite number");
  return value;
}

struct RunConfig {
  Command command = Command::density;
  KeyValues values;  // schema order
  std::string output_path;

  const std::string& get(std::string_view key) const {
    for (const auto& [k, v] : values)
      if (k == key) return v;
    throw ConfigError("unknown key '" + std::string(key) + "' for command " + to_string(command));
  }

  double number(std::string_view key) const { return parse_double(key, get(key)); }

  int integer(std::string_view key) const {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9)
      throw ConfigError("key '" + std::string(key) + "' must be an integer");
    return static_cast<int>(v);
  }

  /// Comma-separated numbers; empty value is an empty list.
  std::vector<double> list(std::string_view key) const {
    std::vector<double> out;
    const std::string& raw = get(key);
    if (trim(raw).empty()) return out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    return out;
  }

  /// Same command and values; the output path is not part of a run's identity.
  bool equivalent(const RunConfig& o) const { return command == o.command && values == o.values; }
};

inline RunConfig default_config(Command c) {
  RunConfig cfg;
  cfg.command = c;
  cfg.values = schema(c);
  return cfg;
}

/// Applies one "key=value" assignment. "command" is accepted only if it names cfg.command.
inline void set_value(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw ConfigError("empty key in '" + std::string(assignment) + "'");
  if (key == "command") {
    if (parse_command(value) != cfg.command)
      throw ConfigError("config is for command '" + value + "' but '" + to_string(cfg.command) + "' was requested");
    return;
  }
  for (auto& [k, v] : cfg.values) {
    if (k == key) {
      v = value;
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "' for command " + to_string(cfg.command));
}

inline constexpr std::string_view kEchoPrefix = "# input ";

/// Parses config text onto the defaults of `c`. Accepts plain "key = value"
/// lines and "# input key=value" echo lines; other '#' lines are comments, and
/// any non-comment line that is not an assignment (such as CSV data) is skipped
/// only when the text carries an echo.
inline RunConfig parse_config_text(Command c, std::string_view text) {
  RunConfig cfg = default_config(c);
  const bool is_echo = text.find(kEchoPrefix) != std::string_view::npos;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (raw.substr(0, kEchoPrefix.size()) == kEchoPrefix) {
      set_value(cfg, raw.substr(kEchoPrefix.size()));
      continue;
    }
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (is_echo) continue;
    if (line.find('=') == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" + line + "'");
    set_value(cfg, line);
  }
  return cfg;
}

inline RunConfig load_config_file(Command c, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(c, ss.str());
}

/// "command=..." followed by every schema key in order.
inline std::vector<std::string> echo_lines(const RunConfig& cfg) {
  std::vector<std::string> out;
  out.push_back("command=" + to_string(cfg.command));
  for (const auto& [k, v] : cfg.values) out.push_back(k + "=" + v);
  return out;
}

/// Reconstructs the RunConfig from the echo of an output file.
inline RunConfig parse_echo(std::string_view text) {
  const std::string marker = std::string(kEchoPrefix) + "command=";
  const auto at = text.find(marker);
  if (at == std::string_view::npos) throw ConfigError("no input echo found");
  const auto end = text.find('\n', at);
  const Command c = parse_command(trim(text.substr(at + marker.size(), end - at - marker.size())));
  return parse_config_text(c, text);
}

} // namespace fermikit::cli
