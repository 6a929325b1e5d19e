#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edl/asymptotics.hpp"
#include "edl/profiles.hpp"
#include "edl/radial_oracle.hpp"

namespace edl::cli {

enum ExitCode { Ok = 0, AcceptanceFailed = 1, BadConfig = 2, SolverFailed = 3 };

struct RunConfig {
  std::string preset;  // name it was expanded from, if any
  Model model = Model::PB;
  std::string nonlinearity;  // "" (use species) or "sinh"
  std::vector<IonSpecies> species;
  std::string shape = "disk";  // disk | ball | annulus
  int dimension = 2;
  double inner_radius = 1.0;
  double outer_radius = 1.0;
  std::vector<RobinData> robin;  // outer first, then the hole
  ProfileOptions profile;
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  double beta = 0.25;
  double T = 5.0;
  std::string output;
  // command specific
  double curvature_sign = 1.0;  // -1 corrupts the second-order term
  int points = 201;             // expand: samples per component
  int order = 2;                // expand: 1 or 2
  RadialGridOptions oracle;
};

// Throws Error(ConfigError) on malformed input or unknown keys.
RunConfig parse_config(std::string_view json_text);
RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();
std::string config_json(const RunConfig& c);

// Builds the module inputs; module precondition failures surface here, before any solve.
struct Prepared {
  RunConfig config;
  std::optional<Nonlinearity> f;  // PB only
  DomainSpec domain;
};
Prepared prepare(const RunConfig& c);

// Each command writes into out (created if missing) and returns an exit code.
// Solver errors propagate as edl::Error.
int cmd_profiles(const Prepared& p, const std::filesystem::path& out, std::ostream& log);
int cmd_constants(const Prepared& p, const std::filesystem::path& out, std::ostream& log);
int cmd_expand(const Prepared& p, const std::filesystem::path& out, std::ostream& log);
int cmd_oracle(const Prepared& p, const std::filesystem::path& out, std::ostream& log);
int cmd_verify(const Prepared& p, const std::filesystem::path& out, std::ostream& log);
int cmd_figures(const Prepared& p, const std::filesystem::path& out, std::ostream& log);

std::vector<std::string> command_names();
// Full pipeline used by the executable: parse, prepare, run; errors become JSON on err.
int run(std::string_view command, std::string_view config_text, const std::filesystem::path& out,
        bool verbose, std::ostream& err);

}  // namespace edl::cli
