#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "edl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boundary-layer expansions and radial oracles for Poisson-Boltzmann problems"};
  app.require_subcommand(1);
  std::string config_path, out;
  bool verbose = false;
  for (const auto& name : edl::cli::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "JSON run configuration")->required();
    sub->add_option("-o,--out", out, "output directory (overrides the config)");
    sub->add_flag("-v,--verbose", verbose, "progress on stderr");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json j{{"error", "ConfigError"}, {"message", e.what()}, {"exit", 2}};
    std::cerr << j.dump() << "\n";
    return edl::cli::BadConfig;
  }
  std::ifstream is(config_path, std::ios::binary);
  if (!is) {
    nlohmann::json j{{"error", "ConfigError"}, {"message", "cannot read " + config_path}, {"exit", 2}};
    std::cerr << j.dump() << "\n";
    return edl::cli::BadConfig;
  }
  std::stringstream text;
  text << is.rdbuf();
  return edl::cli::run(app.get_subcommands().front()->get_name(), text.str(), out, verbose, std::cerr);
}
