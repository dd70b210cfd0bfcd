#include <doctest.h>

#include <string>

#include "config.hpp"

using namespace jamgame::cli;

namespace {

const std::string kCurve =
    "[experiment]\nscenario = curve\nseed = 3\n"
    "[system]\nrate = 1\nnoise_var = 1\n"
    "[curve]\ngains = 1, 4\n";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("a minimal curve config parses") {
  const ExperimentConfig cfg = parse_config(kCurve);
  CHECK(cfg.scenario == Scenario::Curve);
  CHECK(cfg.blocks == 2);
  CHECK(cfg.seed == 3);
  CHECK(cfg.gains == std::vector<double>{1.0, 4.0});
  CHECK(cfg.grid.step == doctest::Approx(0.1));
}

TEST_CASE("unknown keys and sections are named in the error") {
  CHECK(error_of(kCurve + "colour = blue\n").find("curve.colour") != std::string::npos);
  CHECK(error_of(kCurve + "[plotting]\nx = 1\n").find("plotting") != std::string::npos);
  CHECK(error_of("[experiment]\nscenario = dance\n").find("experiment.scenario") !=
        std::string::npos);
  CHECK(error_of("[experiment]\nscenario = curve\n[system]\nrate = x\nnoise_var = 1\n")
            .find("system.rate") != std::string::npos);
}

TEST_CASE("scenario-specific requirements") {
  const std::string head = "[experiment]\nscenario = mixed_m1\n[system]\nrate = 2\nnoise_var = 10\n";
  CHECK(error_of(head).find("channel.kind") != std::string::npos);
  const std::string with_channel = head + "tx_budget = 20\njam_budget = 10\n"
                                          "[channel]\nkind = exponential\nrate = 0.2\n";
  CHECK(error_of(with_channel).find("sweep.tx_budgets") != std::string::npos);
  const ExperimentConfig ok = parse_config(with_channel + "[sweep]\ntx_budgets = 2:2:10, 15\n");
  CHECK(ok.tx_budgets == std::vector<double>{2, 4, 6, 8, 10, 15});
  CHECK(error_of(with_channel + "[sweep]\ntx_budgets = 2\n").empty());

  const std::string two_blocks =
      "[experiment]\nscenario = nocsi_m1\n[system]\nrate = 2\nnoise_var = 10\nblocks = 2\n"
      "jam_budget = 1\n[channel]\nkind = exponential\nrate = 0.2\n[sweep]\ntx_budgets = 1\n";
  CHECK(error_of(two_blocks).find("system.blocks") != std::string::npos);
}

TEST_CASE("config hash follows the bytes") {
  CHECK(parse_config(kCurve).hash == parse_config(kCurve).hash);
  CHECK(parse_config(kCurve).hash != parse_config(kCurve + "; comment\n").hash);
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}
