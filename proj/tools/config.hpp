#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jamgame/channel.hpp"
#include "jamgame/interframe.hpp"
#include "jamgame/intraframe.hpp"

namespace jamgame::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scenario { ShortTerm, PureMaximin, PureMinimax, MixedM1, NoCsiM1, Curve, Verify };

const char* to_string(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::Verify;
  std::uint64_t seed = 0;
  std::string output = "out";

  double rate = 0.0;
  double noise_var = 0.0;
  int blocks = 1;
  double tx_budget = 0.0;
  double jam_budget = 0.0;

  std::optional<ChannelDistribution> channel;
  int states = 400;
  double h_max = 0.0;  // 0: ten mean gains

  std::vector<double> tx_budgets;  // sweep axis

  bool closed_form = false;  // pure scenarios, M = 1 only
  VaseOptions vase;

  std::vector<double> gains;  // curve scenario
  CurveGrid grid;

  int frames = 1000;     // short_term
  int instances = 20;    // verify
  int resolution = 100;  // verify saddle grid

  std::uint64_t hash = 0;  // FNV-1a of the config bytes

  SystemParams params() const { return SystemParams(rate, noise_var, blocks, tx_budget, jam_budget); }
  double truncation() const;
};

// Parses an INI-style file. Every key must be known for its section; the
// message of a ConfigError names the offending key.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace jamgame::cli
