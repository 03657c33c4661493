#include <optional>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "levyspde_tools/commands.hpp"

namespace fs = std::filesystem;
using namespace levyspde;
using namespace levyspde::tools;

int main(int argc, char** argv) {
  CLI::App app{"Galerkin solver and verification suites for 2D hydrodynamics driven by Levy noise"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Config file (sectioned key = value)")->required();
    sub->add_option("--seed", seed, "Base seed (overrides ensemble.seed)");
    sub->add_option("--paths", paths, "Number of paths (overrides ensemble.paths)");
    sub->add_option("--out", out, std::string("Output directory (default: $") + kOutputDirEnv + " or output.dir)");
    sub->add_option("--override", overrides, "section.key=value, repeatable")->take_all();
  };
  auto* simulate = app.add_subcommand("simulate", "Solve an ensemble and write trajectories");
  auto* verify = app.add_subcommand("verify", "Run the model, coefficient, noise, energy and moment suites");
  auto* converge = app.add_subcommand("converge", "Outer-iteration contraction sweep and strong-order study");
  for (auto* s : {simulate, verify, converge}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  RunConfig cfg;
  try {
    if (seed) overrides.push_back("ensemble.seed=" + std::to_string(*seed));
    if (paths) overrides.push_back("ensemble.paths=" + std::to_string(*paths));
    cfg = load_config(config_path, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  }

  fs::path out_dir = cfg.output.dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) out_dir = env;
  if (!out.empty()) out_dir = out;

  try {
    if (simulate->parsed()) return cmd_simulate(cfg, out_dir, std::cout);
    if (verify->parsed()) return cmd_verify(cfg, out_dir, std::cout);
    return cmd_converge(cfg, out_dir, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kInvariantFailure;
  }
}
