#include "scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "jamgame/errors.hpp"
#include "jamgame/interframe.hpp"
#include "jamgame/mixed.hpp"
#include "jamgame/nocsi.hpp"
#include "jamgame/numerics.hpp"
#include "jamgame/oracle.hpp"

#ifndef JAMGAME_VERSION
#define JAMGAME_VERSION "0.0.0"
#endif

namespace jamgame::cli {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// Rows are joined with ',' and written with LF endings after two comment
// lines naming the tool version, scenario, config hash and seed.
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
    rows_.push_back(std::move(line));
  }

  void write(const std::filesystem::path& path, const ExperimentConfig& cfg) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot write");
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash));
    out << "# jamgame " << JAMGAME_VERSION << '\n';
    out << "# scenario=" << to_string(cfg.scenario) << " config_hash=" << hash
        << " seed=" << cfg.seed << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) out << r << '\n';
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

// Evaluates task(i) for i in [0, count) on `threads` workers. Results come
// back in index order; the lowest-index exception is rethrown.
template <class T, class Task>
std::vector<T> parallel_map(std::size_t count, int threads, Task task) {
  std::vector<T> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

DiscretizedStateSpace state_space(const ExperimentConfig& cfg) {
  const ChannelDistribution& dist = *cfg.channel;
  if (dist.is_discrete()) return discrete_space(dist, cfg.blocks);
  return discretize_exponential(dist.rate(), cfg.states, cfg.truncation(), cfg.blocks);
}

void note(const RunOptions& opt, const std::string& msg) {
  if (opt.verbose) std::cerr << msg << '\n';
}

// --- short_term ---

int run_short_term(const ExperimentConfig& cfg, const RunOptions& opt) {
  const SystemParams params = cfg.params();
  struct Frame {
    Eigen::VectorXd h;
    double info = 0.0;
  };
  auto frames = parallel_map<Frame>(cfg.frames, opt.threads, [&](std::size_t i) {
    const ChannelVector h = sample_channel(*cfg.channel, cfg.blocks, cfg.seed + i);
    const FrameSolution sol =
        nash_intraframe(h, params.tx_budget(), params.jam_budget(), params.noise_var());
    return Frame{h.values(), sol.mutual_info};
  });

  std::vector<std::string> columns = {"frame"};
  for (int m = 0; m < cfg.blocks; ++m) columns.push_back("h_" + std::to_string(m));
  columns.insert(columns.end(), {"I_M", "outage"});
  Csv csv(columns);
  int lost = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::vector<std::string> cells = {std::to_string(i)};
    for (Index m = 0; m < frames[i].h.size(); ++m) cells.push_back(num(frames[i].h[m]));
    const bool outage = frames[i].info < params.rate();
    lost += outage;
    cells.insert(cells.end(), {num(frames[i].info), outage ? "1" : "0"});
    csv.row(cells);
  }
  csv.write(std::filesystem::path(opt.out_dir) / "short_term.csv", cfg);
  note(opt, "outage fraction " + num(double(lost) / double(frames.size())));
  return kExitOk;
}

// --- pure_maximin / pure_minimax ---

struct PurePoint {
  double outage = 0.0;
  double level = 0.0;
  Eigen::VectorXd k_grid;
  Eigen::VectorXd k_outage;
  Index winner = 0;
};

int run_pure(const ExperimentConfig& cfg, const RunOptions& opt, bool jammer_first) {
  const std::string name = jammer_first ? "maximin" : "minimax";
  const SystemParams base = cfg.params();
  std::optional<FrameCurves> curves;
  if (!cfg.closed_form) {
    const DiscretizedStateSpace space = state_space(cfg);
    note(opt, "state space with " + std::to_string(space.size()) + " atoms");
    curves.emplace(space, base);
  }

  auto points = parallel_map<PurePoint>(cfg.tx_budgets.size(), opt.threads, [&](std::size_t i) {
    const SystemParams params = base.with_budgets(cfg.tx_budgets[i], base.jam_budget());
    PurePoint pt;
    if (cfg.closed_form) {
      if (jammer_first) {
        const auto cf = maximin_m1(*cfg.channel, params);
        pt.outage = cf.outage;
        pt.level = cf.level;
      } else {
        const auto cf = minimax_m1(*cfg.channel, params);
        pt.outage = cf.outage;
        pt.level = cf.level;
      }
      return pt;
    }
    const PureSolution sol = jammer_first ? maximin_search(*curves, params, cfg.vase)
                                          : minimax_search(*curves, params, cfg.vase);
    pt.outage = sol.outage;
    pt.level = sol.level;
    pt.k_grid = sol.k_grid;
    pt.k_outage = sol.k_outage;
    pt.winner = sol.winner;
    return pt;
  });

  Csv sweep({"P_budget", name, "K"});
  Csv grid({"P_budget", "K", "P_out", "winner"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PurePoint& pt = points[i];
    sweep.row({num(cfg.tx_budgets[i]), num(pt.outage), num(pt.level)});
    for (Index k = 0; k < pt.k_grid.size(); ++k)
      grid.row({num(cfg.tx_budgets[i]), num(pt.k_grid[k]), num(pt.k_outage[k]),
                k == pt.winner ? "1" : "0"});
  }
  const std::filesystem::path dir(opt.out_dir);
  sweep.write(dir / (name + "_sweep.csv"), cfg);
  if (!cfg.closed_form) grid.write(dir / (name + "_grid.csv"), cfg);
  return kExitOk;
}

// --- mixed_m1 / nocsi_m1 ---

struct M1Point {
  double maximin = 0.0;
  double mixed = 0.0;
  double minimax = 0.0;
  double nocsi = 0.0;
};

M1Point m1_point(const ExperimentConfig& cfg, double tx_budget, bool with_nocsi) {
  const SystemParams params = cfg.params().with_budgets(tx_budget, cfg.jam_budget);
  const ChannelDistribution& dist = *cfg.channel;
  M1Point pt;
  pt.maximin = maximin_m1(dist, params).outage;
  pt.minimax = minimax_m1(dist, params).outage;
  pt.mixed = overall_outage_mixed_m1(mixed_firstlevel_m1(dist, params), dist, params);
  if (with_nocsi) pt.nocsi = nocsi_outage_m1(dist.rate(), params).outage;
  return pt;
}

int run_mixed(const ExperimentConfig& cfg, const RunOptions& opt) {
  const std::filesystem::path dir(opt.out_dir);
  const FirstLevelProfile profile = mixed_firstlevel_m1(*cfg.channel, cfg.params());
  note(opt, "tx multiplier " + num(profile.tx_multiplier) + ", jam multiplier " +
                num(profile.jam_multiplier));
  Csv prof({"h", "P_M", "J_M", "branch"});
  for (std::size_t i = 0; i < profile.h.size(); ++i)
    prof.row({num(profile.h[i]), num(profile.tx[i]), num(profile.jam[i]),
              to_string(profile.branch[i])});
  prof.write(dir / "mixed_profile.csv", cfg);

  auto points = parallel_map<M1Point>(cfg.tx_budgets.size(), opt.threads, [&](std::size_t i) {
    return m1_point(cfg, cfg.tx_budgets[i], false);
  });
  Csv sweep({"P_budget", "maximin", "mixed", "minimax"});
  for (std::size_t i = 0; i < points.size(); ++i)
    sweep.row({num(cfg.tx_budgets[i]), num(points[i].maximin), num(points[i].mixed),
               num(points[i].minimax)});
  sweep.write(dir / "mixed_sweep.csv", cfg);
  return kExitOk;
}

int run_nocsi(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto points = parallel_map<M1Point>(cfg.tx_budgets.size(), opt.threads, [&](std::size_t i) {
    return m1_point(cfg, cfg.tx_budgets[i], true);
  });
  Csv sweep({"P_budget", "nocsi", "mixed_csi", "maximin", "minimax"});
  for (std::size_t i = 0; i < points.size(); ++i)
    sweep.row({num(cfg.tx_budgets[i]), num(points[i].nocsi), num(points[i].mixed),
               num(points[i].maximin), num(points[i].minimax)});
  sweep.write(std::filesystem::path(opt.out_dir) / "nocsi_sweep.csv", cfg);
  return kExitOk;
}

// --- curve ---

int run_curve(const ExperimentConfig& cfg, const RunOptions& opt) {
  const Eigen::VectorXd gains = Eigen::Map<const Eigen::VectorXd>(cfg.gains.data(), Index(cfg.gains.size()));
  const PJCurve curve = build_pj_curve(ChannelVector(gains), cfg.grid, cfg.params());
  Csv csv({"J_M", "P_M", "p", "j", "lambda", "mu"});
  for (const CurveSample& s : curve.samples)
    csv.row({num(s.jam), num(s.power), std::to_string(s.first_tx_block),
             std::to_string(s.first_jam_block), num(s.water_level), num(s.jam_multiplier)});
  csv.write(std::filesystem::path(opt.out_dir) / "pj_curve.csv", cfg);
  note(opt, std::to_string(curve.samples.size()) + " curve samples");
  return kExitOk;
}

// --- verify ---

class Suite {
 public:
  explicit Suite(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * numerics::unit_uniform(rng_); }
  Eigen::VectorXd gains(int blocks) {
    Eigen::VectorXd h(blocks);
    for (int m = 0; m < blocks; ++m) h[m] = uniform(0.1, 5.0);
    return h;
  }

  // Keeps the worst report per check name.
  void add(const OracleReport& r) {
    for (auto& kept : reports_) {
      if (kept.name != r.name) continue;
      if ((!r.passed && kept.passed) ||
          (r.passed == kept.passed && r.worst_residual > kept.worst_residual))
        kept = r;
      return;
    }
    reports_.push_back(r);
  }
  void add(const std::string& name, double residual, double tolerance,
           const std::string& witness) {
    OracleReport r;
    r.name = name;
    r.worst_residual = residual;
    r.passed = residual <= tolerance;
    if (!r.passed) r.witness = witness;
    add(r);
  }

  const std::vector<OracleReport>& reports() const { return reports_; }

 private:
  std::mt19937_64 rng_;
  std::vector<OracleReport> reports_;
};

std::string describe(const Eigen::VectorXd& h, double tx, double jam) {
  std::string s = "h=(";
  for (Index m = 0; m < h.size(); ++m) s += (m ? "," : "") + num(h[m]);
  return s + ") P=" + num(tx) + " J=" + num(jam);
}

void verify_frames(const ExperimentConfig& cfg, Suite& suite) {
  const int sizes[] = {1, 2, 4};
  for (int i = 0; i < cfg.instances; ++i) {
    const int blocks = sizes[i % 3];
    const SystemParams params(cfg.rate, cfg.noise_var, blocks);
    const Eigen::VectorXd h = suite.gains(blocks);
    const double tx = suite.uniform(0.5, 5.0) * cfg.noise_var;
    const double jam = suite.uniform(0.0, 3.0) * cfg.noise_var;
    suite.add(grid_saddle_check(ChannelVector(h), tx, jam, params, cfg.resolution));

    const double need = required_tx_power(ChannelVector(h), jam, params).power;
    const double back = required_jam_power(ChannelVector(h), need, params).power;
    suite.add("duality", std::abs(back - jam) / std::max(1.0, jam), 1e-8, describe(h, need, jam));
  }
}

void verify_curves(const ExperimentConfig& cfg, Suite& suite) {
  for (int i = 0; i < cfg.instances; ++i) {
    const int blocks = i % 2 ? 4 : 2;
    const SystemParams params(cfg.rate, cfg.noise_var, blocks);
    const PJCurve curve =
        build_pj_curve(ChannelVector(suite.gains(blocks)), CurveGrid::defaults(params), params);
    suite.add(shape_check(curve));
    suite.add(segment_label_check(curve));
  }
}

void verify_mixed_frame(const ExperimentConfig& cfg, Suite& suite) {
  const SystemParams params(cfg.rate, cfg.noise_var, 1);
  for (int i = 0; i < cfg.instances; ++i) {
    const double h = suite.uniform(0.2, 5.0);
    const double tx = (params.c() - 1.0) * cfg.noise_var / h * suite.uniform(0.5, 5.0);
    const double jam = cfg.noise_var * suite.uniform(0.1, 3.0);
    const PJCurve curve = build_pj_curve(ChannelVector{h}, CurveGrid::defaults(params), params);
    const MixedFrameStrategy s = frame_mixed_equilibrium(curve, tx, jam);
    const std::string where = describe(Eigen::VectorXd::Constant(1, h), tx, jam);
    suite.add("mixed_frame_outage", std::abs(s.outage() - frame_outage_m1(h, tx, jam, params)), 1e-8,
              where);
    const double budget_gap =
        std::max(std::abs(s.tx_mean() - tx) / tx, std::abs(s.jam_mean() - jam) / jam);
    suite.add("mixed_frame_budgets", budget_gap, 1e-3, where);
  }
}

void verify_first_level(const ExperimentConfig& cfg, Suite& suite) {
  const SystemParams params = cfg.params().with_blocks(1);
  const ChannelDistribution& dist = *cfg.channel;
  const FirstLevelProfile profile = mixed_firstlevel_m1(dist, params);
  const StationarityReport st = stationarity_residuals(profile);
  suite.add("first_level_stationarity", st.max_residual, 1e-8, "h=" + num(st.worst_gain));
  const double budget_gap =
      std::abs(profile_tx_mean(profile, dist) - params.tx_budget()) / params.tx_budget();
  suite.add("first_level_budget", budget_gap, 1e-6, "P=" + num(params.tx_budget()));
  suite.add(deviation_check(profile, dist, params, {0.01, 0.05, 0.1}));

  if (!dist.is_discrete()) {
    const NoCsiSaddleReport r = nocsi_saddle_check(dist.rate(), params, {0.1, 0.5, 0.9});
    const double slack = std::min(r.worst_tx_slack, r.worst_jam_slack);
    suite.add("nocsi_saddle", std::max(0.0, -slack), 0.0, "P=" + num(params.tx_budget()));
  }
}

// Quantized brute force brackets both pure solvers on a three-atom toy.
void verify_exhaustive(const ExperimentConfig& cfg, Suite& suite) {
  const double tx_budget = 20.0;
  const double jam_budget = 10.0;
  Eigen::VectorXd h(3), w(3);
  h << 1.0, 3.0, 8.0;
  w << 0.3, 0.4, 0.3;
  const SystemParams params(1.0, 2.0, 1, tx_budget, jam_budget);
  const FrameCurves curves(discrete_space(ChannelDistribution::discrete(h, w)), params);

  ExhaustiveOptions opt;
  opt.tx_quantum = tx_budget / 20.0;
  opt.jam_quantum = jam_budget / 20.0;
  for (int k = 0; k < 16; ++k) opt.levels.push_back(jam_budget / 4.0 * std::pow(256.0, k / 15.0));
  const double slack = double(h.size());

  const double maximin = maximin_search(curves, params, cfg.vase).outage;
  const double minimax = minimax_search(curves, params, cfg.vase).outage;
  const ExhaustiveResult exact = exhaustive_interframe(curves, params, opt);
  const ExhaustiveResult more_jam = exhaustive_interframe(
      curves, params.with_budgets(tx_budget, jam_budget + slack * opt.jam_quantum), opt);
  const ExhaustiveResult more_tx = exhaustive_interframe(
      curves, params.with_budgets(tx_budget + slack * opt.tx_quantum, jam_budget), opt);

  const double maximin_gap = std::max(exact.maximin_outage - maximin, maximin - more_jam.maximin_outage);
  suite.add("exhaustive_maximin", std::max(0.0, maximin_gap), 1e-9,
            "solver=" + num(maximin) + " brute=" + num(exact.maximin_outage));
  const double minimax_gap = std::max(more_tx.minimax_outage - minimax, minimax - exact.minimax_outage);
  suite.add("exhaustive_minimax", std::max(0.0, minimax_gap), 1e-9,
            "solver=" + num(minimax) + " brute=" + num(exact.minimax_outage));
}

int run_verify(const ExperimentConfig& cfg, const RunOptions& opt) {
  Suite suite(cfg.seed);
  verify_frames(cfg, suite);
  verify_curves(cfg, suite);
  verify_mixed_frame(cfg, suite);
  verify_first_level(cfg, suite);
  verify_exhaustive(cfg, suite);

  Csv csv({"check", "passed", "worst_residual", "witness"});
  bool all = true;
  for (const OracleReport& r : suite.reports()) {
    all = all && r.passed;
    csv.row({r.name, r.passed ? "1" : "0", num(r.worst_residual), quoted(r.witness)});
    std::cout << r.to_line() << '\n';
  }
  csv.write(std::filesystem::path(opt.out_dir) / "verify.csv", cfg);
  return all ? kExitOk : kExitOracle;
}

}  // namespace

int run_scenario(const ExperimentConfig& cfg, const RunOptions& options) {
  std::filesystem::create_directories(options.out_dir);
  switch (cfg.scenario) {
    case Scenario::ShortTerm: return run_short_term(cfg, options);
    case Scenario::PureMaximin: return run_pure(cfg, options, true);
    case Scenario::PureMinimax: return run_pure(cfg, options, false);
    case Scenario::MixedM1: return run_mixed(cfg, options);
    case Scenario::NoCsiM1: return run_nocsi(cfg, options);
    case Scenario::Curve: return run_curve(cfg, options);
    case Scenario::Verify: return run_verify(cfg, options);
  }
  return kExitOk;
}

}  // namespace jamgame::cli
