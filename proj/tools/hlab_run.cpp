// Command-line front end: run a suite from a config file, or list suites.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heat-kernel comparison and monotonicity experiments"};
  app.require_subcommand(1);

  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> resolution;
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--resolution", resolution, "grid multiplier (overrides the config)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the suite named in a config file");
  run->add_option("config", config_path, "config file")->required();
  auto* list = app.add_subcommand("list-suites", "list registered suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*list) {
    for (const auto& s : hlab::registered_suites()) {
      std::cout << s.name << "  " << s.description << '\n';
      for (const auto& p : s.params) std::cout << "    " << p.key << " = " << p.value << (p.help.empty() ? "" : "  # " + p.help) << '\n';
    }
    return 0;
  }

  hlab::ExperimentConfig config;
  try {
    const auto entries = hlab::parse_config_file(config_path);
    config = hlab::resolve_config(entries, {out, seed, resolution});
  } catch (const hlab::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return 2;
  }
  const auto outcome = hlab::run_experiment(config, std::cout);
  if (outcome.code == hlab::ExitCode::failure) std::cerr << "numerical failure: " << outcome.error << '\n';
  return static_cast<int>(outcome.code);
}
