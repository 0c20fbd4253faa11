#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fermikit/cli/commands.hpp"

namespace fc = fermikit::cli;

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium properties of a trapped two-component Fermi gas"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fc::kVersion));

  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  bool no_metadata = false;

  for (const char* name : {"density", "stability", "bcs"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " analysis");
    sub->add_option("--config", config_path, "key=value configuration file")->required();
    sub->add_option("--set", overrides, "override a configuration key (key=value)")->take_all();
    sub->add_option("--out", out_path, "output CSV path")->required();
    sub->add_flag("--no-metadata", no_metadata, "omit run metadata comments");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? fc::kExitOk : fc::kExitConfig;
  }

  try {
    const fc::Command command = fc::parse_command(app.get_subcommands().front()->get_name());
    fc::RunConfig cfg = fc::load_config_file(command, config_path);
    for (const auto& assignment : overrides) fc::set_value(cfg, assignment);
    cfg.output_path = out_path;
    fc::write_outputs(fc::run(cfg, {!no_metadata}));
    return fc::kExitOk;
  } catch (const fermikit::InvalidInput& e) {
    std::cerr << "fermikit: invalid input: " << e.what() << '\n';
    return fc::kExitConfig;
  } catch (const fermikit::NumericalError& e) {
    std::cerr << "fermikit: numerical failure: " << e.what() << '\n';
    return fc::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "fermikit: " << e.what() << '\n';
    return fc::kExitNumerical;
  }
}
