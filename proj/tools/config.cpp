#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "jamgame/errors.hpp"

namespace jamgame::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment", {"scenario", "seed", "output"}},
      {"system", {"rate", "noise_var", "blocks", "tx_budget", "jam_budget"}},
      {"channel", {"kind", "rate", "values", "probabilities"}},
      {"discretization", {"states", "h_max"}},
      {"sweep", {"tx_budgets"}},
      {"solver", {"method", "jam_quantum_fraction", "k_points", "refine_points"}},
      {"curve", {"gains", "step", "growth", "points", "refine"}},
      {"short_term", {"frames"}},
      {"verify", {"instances", "resolution"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(value))
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  return value;
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  return value;
}

// Comma-separated numbers; an item "a:step:b" expands to a, a+step, ..., b.
std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) throw ConfigError(key + ": empty list item");
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(to_double(key, item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError(key + ": range needs start:step:stop");
    const double start = to_double(key, item.substr(0, c1));
    const double step = to_double(key, item.substr(c1 + 1, c2 - c1 - 1));
    const double stop = to_double(key, item.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) throw ConfigError(key + ": bad range '" + item + "'");
    const long long n = std::llround(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(start + double(i) * step);
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

Scenario to_scenario(const std::string& raw) {
  const std::string s = trim(raw);
  static const std::map<std::string, Scenario> names = {
      {"short_term", Scenario::ShortTerm}, {"pure_maximin", Scenario::PureMaximin},
      {"pure_minimax", Scenario::PureMinimax}, {"mixed_m1", Scenario::MixedM1},
      {"nocsi_m1", Scenario::NoCsiM1},     {"curve", Scenario::Curve},
      {"verify", Scenario::Verify}};
  const auto it = names.find(s);
  if (it == names.end()) throw ConfigError("experiment.scenario: unknown scenario '" + raw + "'");
  return it->second;
}

// Flat view of the parsed file: "section.key" -> raw value.
class Entries {
 public:
  explicit Entries(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
      if (body.empty()) throw ConfigError(section + ": key outside any section");
      const auto known = schema().find(section);
      if (known == schema().end()) throw ConfigError(section + ": unknown section");
      for (const auto& [key, value] : body) {
        if (!known->second.count(key)) throw ConfigError(section + "." + key + ": unknown key");
        values_[section + "." + key] = value.data();
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key + ": required for this scenario");
    return it->second;
  }
  double number(const std::string& key) const { return to_double(key, raw(key)); }
  long long integer(const std::string& key) const { return to_integer(key, raw(key)); }

 private:
  std::map<std::string, std::string> values_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Index(v.size()));
}

void read_channel(const Entries& e, ExperimentConfig& cfg) {
  const std::string kind = trim(e.raw("channel.kind"));
  try {
    if (kind == "exponential") {
      if (e.has("channel.values") || e.has("channel.probabilities"))
        throw ConfigError("channel.values: not allowed for an exponential channel");
      cfg.channel = ChannelDistribution::exponential(e.number("channel.rate"));
    } else if (kind == "discrete") {
      if (e.has("channel.rate")) throw ConfigError("channel.rate: not allowed for a discrete channel");
      const auto values = to_list("channel.values", e.raw("channel.values"));
      const auto probs = to_list("channel.probabilities", e.raw("channel.probabilities"));
      if (values.size() != probs.size())
        throw ConfigError("channel.probabilities: length differs from channel.values");
      cfg.channel = ChannelDistribution::discrete(to_vector(values), to_vector(probs));
    } else {
      throw ConfigError("channel.kind: expected exponential or discrete, got '" + kind + "'");
    }
  } catch (const ParameterError& err) {
    throw ConfigError(std::string("channel: ") + err.what());
  }
}

int positive_int(const Entries& e, const std::string& key, int fallback) {
  if (!e.has(key)) return fallback;
  const long long v = e.integer(key);
  if (v < 1 || v > 1'000'000'000) throw ConfigError(key + ": must be a positive integer");
  return static_cast<int>(v);
}

void require_single_block(const ExperimentConfig& cfg) {
  if (cfg.blocks != 1) throw ConfigError("system.blocks: this scenario needs blocks = 1");
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::ShortTerm: return "short_term";
    case Scenario::PureMaximin: return "pure_maximin";
    case Scenario::PureMinimax: return "pure_minimax";
    case Scenario::MixedM1: return "mixed_m1";
    case Scenario::NoCsiM1: return "nocsi_m1";
    case Scenario::Curve: return "curve";
    case Scenario::Verify: return "verify";
  }
  return "unknown";
}

double ExperimentConfig::truncation() const {
  if (h_max > 0.0) return h_max;
  return channel ? 10.0 * channel->mean() : 0.0;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& err) {
    throw ConfigError("line " + std::to_string(err.line()) + ": " + err.message());
  }
  const Entries e(tree);

  ExperimentConfig cfg;
  cfg.hash = fnv1a(text);
  cfg.scenario = to_scenario(e.raw("experiment.scenario"));
  if (e.has("experiment.seed")) {
    const long long seed = e.integer("experiment.seed");
    if (seed < 0) throw ConfigError("experiment.seed: must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (e.has("experiment.output")) cfg.output = trim(e.raw("experiment.output"));

  cfg.rate = e.number("system.rate");
  cfg.noise_var = e.number("system.noise_var");
  cfg.blocks = positive_int(e, "system.blocks", 1);
  if (e.has("system.tx_budget")) cfg.tx_budget = e.number("system.tx_budget");
  if (e.has("system.jam_budget")) cfg.jam_budget = e.number("system.jam_budget");
  try {
    (void)cfg.params();
  } catch (const ParameterError& err) {
    throw ConfigError(std::string("system: ") + err.what());
  }

  if (e.has("channel.kind")) read_channel(e, cfg);
  cfg.states = positive_int(e, "discretization.states", cfg.states);
  if (e.has("discretization.h_max")) {
    cfg.h_max = e.number("discretization.h_max");
    if (!(cfg.h_max > 0.0)) throw ConfigError("discretization.h_max: must be positive");
  }
  if (e.has("sweep.tx_budgets")) {
    cfg.tx_budgets = to_list("sweep.tx_budgets", e.raw("sweep.tx_budgets"));
    for (double p : cfg.tx_budgets)
      if (p < 0.0) throw ConfigError("sweep.tx_budgets: budgets must be non-negative");
  }

  if (e.has("solver.method")) {
    const std::string m = trim(e.raw("solver.method"));
    if (m == "closed_form") cfg.closed_form = true;
    else if (m != "discrete") throw ConfigError("solver.method: expected discrete or closed_form");
  }
  if (e.has("solver.jam_quantum_fraction")) {
    cfg.vase.jam_quantum_fraction = e.number("solver.jam_quantum_fraction");
    if (!(cfg.vase.jam_quantum_fraction > 0.0 && cfg.vase.jam_quantum_fraction <= 1.0))
      throw ConfigError("solver.jam_quantum_fraction: must lie in (0, 1]");
  }
  cfg.vase.k_points = positive_int(e, "solver.k_points", cfg.vase.k_points);
  cfg.vase.refine_points = positive_int(e, "solver.refine_points", cfg.vase.refine_points);

  if (e.has("curve.gains")) cfg.gains = to_list("curve.gains", e.raw("curve.gains"));
  cfg.grid = CurveGrid::defaults(cfg.params());
  if (e.has("curve.step")) cfg.grid.step = e.number("curve.step");
  if (e.has("curve.growth")) cfg.grid.growth = e.number("curve.growth");
  cfg.grid.points = positive_int(e, "curve.points", cfg.grid.points);
  if (e.has("curve.refine")) cfg.grid.refine = to_bool("curve.refine", e.raw("curve.refine"));

  cfg.frames = positive_int(e, "short_term.frames", cfg.frames);
  cfg.instances = positive_int(e, "verify.instances", cfg.instances);
  cfg.resolution = positive_int(e, "verify.resolution", cfg.resolution);

  auto need_channel = [&] {
    if (!cfg.channel) throw ConfigError("channel.kind: required for this scenario");
  };
  auto need = [&](const std::string& key) { (void)e.raw(key); };
  switch (cfg.scenario) {
    case Scenario::ShortTerm:
      need_channel();
      need("system.tx_budget");
      need("system.jam_budget");
      break;
    case Scenario::PureMaximin:
    case Scenario::PureMinimax:
      need_channel();
      need("system.jam_budget");
      need("sweep.tx_budgets");
      if (cfg.closed_form) require_single_block(cfg);
      break;
    case Scenario::MixedM1:
      need_channel();
      need("system.tx_budget");
      need("system.jam_budget");
      need("sweep.tx_budgets");
      require_single_block(cfg);
      break;
    case Scenario::NoCsiM1:
      need_channel();
      need("system.jam_budget");
      need("sweep.tx_budgets");
      require_single_block(cfg);
      if (cfg.channel->is_discrete()) throw ConfigError("channel.kind: nocsi_m1 needs exponential");
      break;
    case Scenario::Curve:
      need("curve.gains");
      if (e.has("system.blocks") && cfg.blocks != int(cfg.gains.size()))
        throw ConfigError("curve.gains: count differs from system.blocks");
      for (double g : cfg.gains)
        if (g < 0.0) throw ConfigError("curve.gains: gains must be non-negative");
      cfg.blocks = static_cast<int>(cfg.gains.size());
      break;
    case Scenario::Verify:
      need_channel();
      need("system.tx_budget");
      need("system.jam_budget");
      break;
  }
  return cfg;
}

}  // namespace jamgame::cli
