// Batch runner: one config file in, CSV files out.

#include <CLI11.hpp>
#include <iostream>
#include <thread>

#include "config.hpp"
#include "jamgame/errors.hpp"
#include "scenarios.hpp"

int main(int argc, char** argv) {
  using namespace jamgame;
  using namespace jamgame::cli;

  CLI::App app{"Equilibrium power control and outage under jamming"};
  std::string config_path;
  std::string out_dir;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool verbose = false;
  app.add_option("--config", config_path, "Experiment config file")->required();
  app.add_option("--out", out_dir, "Output directory (overrides experiment.output)");
  app.add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "Progress notes on stderr");
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfig;
  }

  RunOptions options;
  options.out_dir = out_dir.empty() ? cfg.output : out_dir;
  options.threads = threads;
  options.verbose = verbose;
  try {
    return run_scenario(cfg, options);
  } catch (const ParameterError& err) {
    std::cerr << "config error: " << to_string(cfg.scenario) << ": " << err.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& err) {
    std::cerr << "infeasible: " << to_string(cfg.scenario) << ": " << err.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& err) {
    std::cerr << "error: " << to_string(cfg.scenario) << ": " << err.what() << '\n';
    return 1;
  }
}
