#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ostrovsky-Hunter half-line solver and estimate certifier"};
  app.set_version_flag("--version", std::string("ohx ") + OHX_VERSION);

  std::string command;
  std::string config;
  std::string out;
  app.add_option("command", command, "validate-flux | run | certify | sweep | converge")
      ->required()
      ->check(CLI::IsMember({"validate-flux", "run", "certify", "sweep", "converge"}));
  app.add_option("--config,-c", config, "INI run configuration")->required();
  app.add_option("--out,-o", out, "output directory (overrides output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ohx::cli::exit_config;
  }

  std::optional<std::filesystem::path> out_dir;
  if (!out.empty()) out_dir = out;
  return ohx::cli::run_command(command, config, out_dir, std::cout);
}
