#include "jamgame/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "jamgame/errors.hpp"

namespace jamgame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

// Mutual information written out directly, independent of the solver's helpers.
double rate_of(const Eigen::VectorXd& h, const Eigen::VectorXd& tx, const Eigen::VectorXd& jam,
               double noise) {
  double acc = 0.0;
  for (Index m = 0; m < h.size(); ++m) acc += std::log1p(h[m] * tx[m] / (noise + jam[m]));
  return acc / double(h.size());
}

long long binomial(long long n, long long k) {
  long double r = 1.0L;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r > 9e18L ? std::numeric_limits<long long>::max() : static_cast<long long>(r + 0.5L);
}

// Calls visit(parts) for every way of writing `total` as `slots` ordered
// non-negative parts (exact sum when `exact`, otherwise sum <= total).
void for_each_composition(int total, int slots, bool exact,
                          const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> parts(slots, 0);
  std::function<void(int, int)> rec = [&](int slot, int left) {
    if (slot == slots - 1) {
      if (exact) {
        parts[slot] = left;
        visit(parts);
      } else {
        for (int k = 0; k <= left; ++k) {
          parts[slot] = k;
          visit(parts);
        }
      }
      return;
    }
    for (int k = 0; k <= left; ++k) {
      parts[slot] = k;
      rec(slot + 1, left - k);
    }
  };
  if (slots > 0) rec(0, total);
}

int quanta_in(double budget, double quantum) {
  return quantum > 0.0 ? static_cast<int>(std::floor(budget / quantum * (1.0 + 1e-12))) : 0;
}

// Single-block frame outage under the mixed equilibrium, written from the
// two-case expression.
double frame_outage(double h, double tx, double jam, double slope, double noise) {
  if (tx <= 0.0 || h <= 0.0) return 1.0;
  const double x = h * tx / slope;
  const double spread = jam + std::sqrt(jam * jam + 2.0 * jam * noise);
  if (x <= 0.5 * spread + noise) return 1.0 - x / (spread + noise);
  return 0.5 * jam / (x - noise);
}

}  // namespace

std::string OracleReport::to_line() const {
  std::ostringstream os;
  os.precision(6);
  os << name << ' ' << (passed ? "PASS" : "FAIL") << " residual=" << worst_residual;
  if (!witness.empty()) os << " witness=" << witness;
  if (seed != 0) os << " seed=" << seed;
  return os.str();
}

OracleReport grid_saddle_check(const ChannelVector& h, const BlockAllocation& alloc,
                               const SystemParams& params, int resolution, double tolerance) {
  OracleReport report;
  report.name = "grid_saddle";
  const int blocks = static_cast<int>(h.size());
  if (alloc.tx.size() != blocks || alloc.jam.size() != blocks)
    throw AlignmentError("allocation length differs from the channel");
  if (resolution < 1 || resolution > 1000) throw ParameterError("resolution must be in [1, 1000]");
  if (blocks > 4) throw CapacityError("grid saddle check supports at most 4 blocks");
  const long long count = binomial(resolution + blocks - 1, blocks - 1);
  if (count > kSaddleGridCap)
    throw CapacityError("saddle grid of " + std::to_string(count) + " points exceeds the cap");

  const Eigen::VectorXd& g = h.values();
  const double noise = params.noise_var();
  const double base = rate_of(g, alloc.tx, alloc.jam, noise);
  const double tx_total = alloc.tx.sum();
  const double jam_total = alloc.jam.sum();

  double tx_gain = 0.0, jam_gain = 0.0;
  Eigen::VectorXd tx_witness, jam_witness;
  Eigen::VectorXd trial(blocks);
  for_each_composition(resolution, blocks, true, [&](const std::vector<int>& parts) {
    for (int m = 0; m < blocks; ++m) trial[m] = tx_total * parts[m] / resolution;
    const double up = rate_of(g, trial, alloc.jam, noise) - base;
    if (up > tx_gain) {
      tx_gain = up;
      tx_witness = trial;
    }
    for (int m = 0; m < blocks; ++m) trial[m] = jam_total * parts[m] / resolution;
    const double down = base - rate_of(g, alloc.tx, trial, noise);
    if (down > jam_gain) {
      jam_gain = down;
      jam_witness = trial;
    }
  });

  report.worst_residual = std::max(tx_gain, jam_gain);
  report.passed = report.worst_residual <= tolerance;
  if (!report.passed) {
    report.witness = tx_gain >= jam_gain ? "tx=" + format_vector(tx_witness)
                                         : "jam=" + format_vector(jam_witness);
    report.witness += " h=" + format_vector(g);
  }
  return report;
}

OracleReport grid_saddle_check(const ChannelVector& h, double tx_mean, double jam_mean,
                               const SystemParams& params, int resolution, double tolerance) {
  const FrameSolution sol = nash_intraframe(h, tx_mean, jam_mean, params.noise_var());
  return grid_saddle_check(h, sol.alloc, params, resolution, tolerance);
}

ExhaustiveResult exhaustive_interframe(const FrameCurves& curves, const SystemParams& params,
                                       const ExhaustiveOptions& options) {
  const int atoms = static_cast<int>(curves.size());
  if (atoms < 1) throw ParameterError("no atoms");
  if (options.tx_quantum < 0.0 || options.jam_quantum < 0.0)
    throw ParameterError("quanta must be non-negative");
  const double tx_budget = params.tx_budget();
  const double jam_budget = params.jam_budget();
  const double jam_quantum = options.jam_quantum > 0.0 ? options.jam_quantum : jam_budget / 20.0;
  const double tx_quantum = options.tx_quantum > 0.0 ? options.tx_quantum : tx_budget / 20.0;
  const int jam_quanta = quanta_in(jam_budget, jam_quantum);
  const int tx_quanta = quanta_in(tx_budget, tx_quantum);
  const int levels = static_cast<int>(options.levels.size());

  const long long maximin_count = binomial(jam_quanta + atoms, atoms);
  // Each atom also gets the option of spreading its spend over all its frames.
  const int choices = levels + 1;
  long long level_combos = 1;
  for (int i = 0; i < atoms && level_combos < options.cap; ++i) level_combos *= choices;
  const long long minimax_count = binomial(tx_quanta + atoms, atoms) * level_combos;
  if (maximin_count + minimax_count > options.cap)
    throw CapacityError("exhaustive search of " + std::to_string(maximin_count + minimax_count) +
                        " allocations exceeds the cap");
  if (levels == 0) throw ParameterError("exhaustive minimax needs at least one level");

  ExhaustiveResult out;
  Eigen::VectorXd w = curves.probabilities();

  // Jammer first. Power needed in atom i when it receives n quanta.
  std::vector<std::vector<double>> need(atoms, std::vector<double>(jam_quanta + 1));
  for (int i = 0; i < atoms; ++i)
    for (int n = 0; n <= jam_quanta; ++n)
      need[i][n] = w[i] > 0.0 ? curves.power(i, n * jam_quantum / w[i]) : kInf;

  std::vector<int> order(atoms);
  out.maximin_outage = -1.0;
  for_each_composition(jam_quanta, atoms, false, [&](const std::vector<int>& parts) {
    ++out.evaluations;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return need[a][parts[a]] < need[b][parts[b]]; });
    double left = tx_budget, served = 0.0;
    for (int i : order) {
      const double price = w[i] * need[i][parts[i]];
      if (!std::isfinite(price) || left <= 0.0) break;
      if (price <= left) {
        served += w[i];
        left -= price;
      } else {
        served += w[i] * left / price;
        left = 0.0;
      }
    }
    const double outage = std::clamp(1.0 - served, 0.0, 1.0);
    if (outage > out.maximin_outage) {
      out.maximin_outage = outage;
      out.maximin_jam.resize(atoms);
      for (int i = 0; i < atoms; ++i) out.maximin_jam[i] = w[i] > 0.0 ? parts[i] * jam_quantum / w[i] : 0.0;
    }
  });

  // Transmitter first. Protecting atom i at level k costs need_tx[i][k] per frame.
  std::vector<std::vector<double>> need_tx(atoms, std::vector<double>(levels));
  for (int i = 0; i < atoms; ++i)
    for (int k = 0; k < levels; ++k) need_tx[i][k] = curves.power(i, options.levels[k]);
  // Jamming that kills atom i when n quanta are spread over all its frames.
  std::vector<std::vector<double>> spread_price(atoms, std::vector<double>(tx_quanta + 1, 0.0));
  for (int i = 0; i < atoms; ++i)
    for (int n = 1; n <= tx_quanta && w[i] > 0.0; ++n)
      spread_price[i][n] = curves.jam(i, n * tx_quantum / w[i]);

  std::vector<int> pick(atoms, 0);
  std::vector<double> mass(atoms), price(atoms);
  out.minimax_outage = 2.0;
  for_each_composition(tx_quanta, atoms, false, [&](const std::vector<int>& parts) {
    std::fill(pick.begin(), pick.end(), 0);
    for (long long combo = 0; combo < level_combos; ++combo) {
      ++out.evaluations;
      double funded = 0.0;
      for (int i = 0; i < atoms; ++i) {
        const double spend = parts[i] * tx_quantum;
        if (pick[i] == levels) {
          price[i] = spread_price[i][parts[i]];
          mass[i] = price[i] > 0.0 ? w[i] : 0.0;  // zero: below the unjammed requirement
        } else {
          const double unit = need_tx[i][pick[i]];
          mass[i] = (spend > 0.0 && std::isfinite(unit)) ? std::min(w[i], spend / unit) : 0.0;
          price[i] = options.levels[pick[i]];
        }
        funded += mass[i];
      }
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) { return price[a] < price[b]; });
      double left = jam_budget, killed = 0.0;
      for (int i : order) {
        if (mass[i] <= 0.0) continue;
        if (left <= 0.0) break;
        const double take = price[i] > 0.0 ? std::min(mass[i], left / price[i]) : mass[i];
        killed += take;
        left -= take * price[i];
      }
      const double outage = std::clamp(1.0 - funded + killed, 0.0, 1.0);
      if (outage < out.minimax_outage) {
        out.minimax_outage = outage;
        out.minimax_tx.resize(atoms);
        out.minimax_levels.resize(atoms);
        for (int i = 0; i < atoms; ++i) {
          out.minimax_tx[i] = parts[i] * tx_quantum;
          out.minimax_levels[i] = price[i];
        }
      }
      for (int i = 0; i < atoms; ++i) {  // odometer over level choices
        if (++pick[i] < choices) break;
        pick[i] = 0;
      }
    }
  });
  return out;
}

OracleReport shape_check(const PJCurve& curve, double tolerance) {
  OracleReport report;
  report.name = "curve_shape";
  const auto& s = curve.samples;
  std::vector<double> slope;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double dp = s[k].power - s[k - 1].power;
    const double dj = s[k].jam - s[k - 1].jam;
    if (!(dj > 0.0) || !(dp > 0.0)) {
      report.passed = false;
      report.worst_residual = std::max(report.worst_residual, -dp);
      report.witness = "non-increasing at sample " + std::to_string(k);
      return report;
    }
    slope.push_back(dp / dj);
  }
  for (std::size_t k = 1; k < slope.size(); ++k) {
    const double rise = (slope[k] - slope[k - 1]) / std::max(slope[k], slope[k - 1]);
    if (rise > report.worst_residual) {
      report.worst_residual = rise;
      if (rise > tolerance) report.witness = "convex kink at sample " + std::to_string(k);
    }
  }
  report.passed = report.worst_residual <= tolerance;
  return report;
}

OracleReport segment_label_check(const PJCurve& curve, double tolerance) {
  OracleReport report;
  report.name = "curve_segments";
  const auto& s = curve.samples;
  auto same_piece = [&](std::size_t a, std::size_t b) {
    return s[a].first_tx_block == s[b].first_tx_block &&
           s[a].first_jam_block == s[b].first_jam_block;
  };
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    if (!same_piece(k - 1, k) || !same_piece(k, k + 1)) continue;
    const double left = (s[k].power - s[k - 1].power) / (s[k].jam - s[k - 1].jam);
    const double right = (s[k + 1].power - s[k].power) / (s[k + 1].jam - s[k].jam);
    const double bend = (left - right) / std::max(left, right);
    const bool affine_piece = s[k].first_tx_block == s[k].first_jam_block;
    // Affine pieces must not bend; the others must.
    const double violation = affine_piece ? std::abs(bend) : std::max(0.0, tolerance - bend);
    if (violation > report.worst_residual) {
      report.worst_residual = violation;
      if (violation > tolerance)
        report.witness = (affine_piece ? "bent affine piece at sample " : "straight mixed piece at sample ") +
                         std::to_string(k);
    }
  }
  report.passed = report.witness.empty();
  return report;
}

OracleReport deviation_check(const FirstLevelProfile& profile, const ChannelDistribution& dist,
                             const SystemParams& params, const std::vector<double>& epsilons,
                             double tolerance) {
  OracleReport report;
  report.name = "first_level_deviation";
  const double slope = params.c() - 1.0;
  const double noise = params.noise_var();
  const double h01 = profile.off_threshold;
  const double h12 = profile.case_threshold;

  auto integrate_pieces = [&](const std::function<double(double)>& f, double split) {
    std::vector<double> cuts{0.0, h01, h12, split, kInf};
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 1; k < cuts.size(); ++k) acc += dist.expect(f, cuts[k - 1], cuts[k]);
    return acc;
  };
  auto tx_of = [&](double g) { return profile.tx_power(g); };
  auto jam_of = [&](double g) { return profile.jam_power(g); };
  auto outage_of = [&](const std::function<double(double)>& tx, const std::function<double(double)>& jam,
                       double split) {
    return integrate_pieces([&](double g) { return frame_outage(g, tx(g), jam(g), slope, noise); },
                            split);
  };

  const double mid = h01 + 0.5 * (h12 - h01);
  const double value = outage_of(tx_of, jam_of, mid);
  const std::vector<double> splits{mid, h12, 2.0 * h12, 4.0 * h12};

  for (double eps : epsilons) {
    for (double split : splits) {
      for (double sign : {1.0, -1.0}) {
        auto tilt = [&](const std::function<double(double)>& base) {
          auto raw = [base, split, eps, sign](double g) {
            return base(g) * (1.0 + (g <= split ? sign : -sign) * eps);
          };
          const double total = integrate_pieces(base, split);
          const double scale = total / integrate_pieces(raw, split);
          return std::function<double(double)>([raw, scale](double g) { return scale * raw(g); });
        };
        const double tx_dev = outage_of(tilt(tx_of), jam_of, split);
        const double jam_dev = outage_of(tx_of, tilt(jam_of), split);
        const double tx_profit = value - tx_dev;   // transmitter lowers outage
        const double jam_profit = jam_dev - value;  // jammer raises it
        const double worst = std::max(tx_profit, jam_profit);
        if (worst > report.worst_residual) {
          report.worst_residual = worst;
          std::ostringstream os;
          os.precision(6);
          os << (tx_profit >= jam_profit ? "tx" : "jam") << " eps=" << eps << " split=" << split
             << " sign=" << sign;
          report.witness = os.str();
        }
      }
    }
  }
  report.passed = report.worst_residual <= tolerance;
  if (report.passed) report.witness.clear();
  return report;
}

}  // namespace jamgame
