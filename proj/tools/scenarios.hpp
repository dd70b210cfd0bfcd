#pragma once

#include <string>

#include "config.hpp"

namespace jamgame::cli {

struct RunOptions {
  std::string out_dir;
  int threads = 1;
  bool verbose = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitOracle = 4;

// Runs one scenario and writes its CSV files into options.out_dir. Returns
// kExitOk, or kExitOracle when a verify check fails; solver errors propagate.
int run_scenario(const ExperimentConfig& cfg, const RunOptions& options);

}  // namespace jamgame::cli
