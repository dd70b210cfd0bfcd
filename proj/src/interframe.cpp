#include "jamgame/interframe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "jamgame/errors.hpp"
#include "jamgame/numerics.hpp"

namespace jamgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

FrameCurves::FrameCurves(const DiscretizedStateSpace& space, const SystemParams& params)
    : probs_(space.mass) {
  for (const auto& s : space.states)
    if (s.size() != params.blocks()) throw AlignmentError("state length differs from M");
  const double noise = params.noise_var();
  if (params.blocks() == 1) {
    Eigen::VectorXd gains(space.size());
    for (Index i = 0; i < space.size(); ++i) gains[i] = space.states[i][0];
    const double slope = params.c() - 1.0;
    power_ = [gains, slope, noise](Index i, double jam) {
      return gains[i] > 0.0 ? slope * (jam + noise) / gains[i] : kInf;
    };
    inverse_ = [gains, slope, noise](Index i, double power) {
      return std::max(0.0, gains[i] * power / slope - noise);
    };
    return;
  }
  auto states = std::make_shared<const std::vector<ChannelVector>>(space.states);
  power_ = [states, params](Index i, double jam) {
    const ChannelVector& h = (*states)[i];
    if (h[h.size() - 1] <= 0.0) return kInf;
    return required_tx_power(h, jam, params).power;
  };
  inverse_ = [states, params](Index i, double power) {
    return required_jam_power((*states)[i], power, params).power;
  };
}

FrameCurves::FrameCurves(Eigen::VectorXd probabilities, PowerFn power_for_jam,
                         PowerFn jam_for_power)
    : probs_(std::move(probabilities)),
      power_(std::move(power_for_jam)),
      inverse_(std::move(jam_for_power)) {
  if (probs_.size() == 0 || (probs_.array() < 0.0).any())
    throw ParameterError("atom probabilities must be non-empty and non-negative");
}

double FrameCurves::jam(Index atom, double power) const {
  if (inverse_) return inverse_(atom, power);
  if (power <= power_(atom, 0.0)) return 0.0;
  auto covers = [&](double j) { return power_(atom, j) >= power; };
  const double hi = numerics::grow_until(covers, 1e-3);
  return numerics::bisect_first_true(covers, 0.0, hi);
}

namespace {

// Greedy fractional purchase in ascending cost order. Returns bought mass;
// `served` receives per-atom fractions.
double buy_cheapest(const FrameCurves& curves, const Eigen::VectorXd& cost, double budget,
                    Eigen::VectorXd& served, double& spent) {
  const Index n = curves.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return cost[a] < cost[b]; });
  served.setZero(n);
  spent = 0.0;
  double mass = 0.0;
  for (Index i : order) {
    const double w = curves.probability(i);
    if (w <= 0.0) continue;
    if (!std::isfinite(cost[i])) break;
    const double price = w * cost[i];
    if (spent + price <= budget) {
      served[i] = 1.0;
      spent += price;
      mass += w;
    } else {
      const double frac = price > 0.0 ? (budget - spent) / price : 1.0;
      served[i] = frac;
      spent = budget;
      mass += frac * w;
      break;
    }
  }
  return mass;
}

// Lazily evaluated required power on the common jam grid k * step.
class LevelTable {
 public:
  LevelTable(const FrameCurves& curves, double step) : curves_(curves), step_(step), rows_(curves.size()) {}

  double at(Index atom, Index level) {
    auto& row = rows_[atom];
    while (Index(row.size()) <= level) row.push_back(curves_.power(atom, double(row.size()) * step_));
    return row[level];
  }
  double step() const { return step_; }

 private:
  const FrameCurves& curves_;
  double step_;
  std::vector<std::vector<double>> rows_;
};

struct MaximinState {
  double outage = 1.0;
  Eigen::VectorXd jam, required, served;
  double jam_spent = 0.0, tx_spent = 0.0;
};

double jam_step(const FrameCurves& curves, const SystemParams& params, const VaseOptions& opt) {
  const double quantum = params.jam_budget() * opt.jam_quantum_fraction;
  const double heaviest = curves.probabilities().maxCoeff();
  return quantum > 0.0 && heaviest > 0.0 ? quantum / heaviest : 0.0;
}

MaximinState maximin_at(const FrameCurves& curves, const SystemParams& params, double cap,
                        LevelTable& table) {
  const Index n = curves.size();
  const double budget = params.jam_budget();
  const double step = table.step();
  MaximinState st;
  st.jam.setZero(n);
  st.required.resize(n);
  std::vector<Index> level(n, 0);

  struct Candidate {
    double slope;
    Index atom;
    bool operator<(const Candidate& o) const {
      return slope != o.slope ? slope < o.slope : atom > o.atom;  // max slope, then lowest index
    }
  };
  std::priority_queue<Candidate> heap;
  auto offer = [&](Index i) {
    const double next = table.at(i, level[i] + 1);
    if (next <= cap) heap.push({(next - st.required[i]) / step, i});
  };
  for (Index i = 0; i < n; ++i) {
    st.required[i] = table.at(i, 0);
    if (budget > 0.0 && step > 0.0 && curves.probability(i) > 0.0 && std::isfinite(st.required[i]))
      offer(i);
  }
  while (!heap.empty() && st.jam_spent < budget) {
    const Index i = heap.top().atom;
    heap.pop();
    const double w = curves.probability(i);
    const double cost = w * step;
    if (st.jam_spent + cost <= budget) {
      ++level[i];
      st.jam[i] = double(level[i]) * step;
      st.required[i] = table.at(i, level[i]);
      st.jam_spent += cost;
      offer(i);
    } else {
      // Last partial quantum: spend exactly what is left.
      st.jam[i] += (budget - st.jam_spent) / w;
      st.required[i] = curves.power(i, st.jam[i]);
      st.jam_spent = budget;
      break;
    }
  }
  const double mass = buy_cheapest(curves, st.required, params.tx_budget(), st.served, st.tx_spent);
  st.outage = std::clamp(1.0 - mass, 0.0, 1.0);
  return st;
}

struct MinimaxState {
  double outage = 1.0;
  Eigen::VectorXd required, served, jammed;
  double tx_spent = 0.0, jam_spent = 0.0;
};

MinimaxState minimax_at(const FrameCurves& curves, const SystemParams& params, double level,
                        bool detailed) {
  const Index n = curves.size();
  MinimaxState st;
  st.required.resize(n);
  for (Index i = 0; i < n; ++i) st.required[i] = curves.power(i, level);
  const double funded = buy_cheapest(curves, st.required, params.tx_budget(), st.served, st.tx_spent);
  const double jam_budget = params.jam_budget();
  const double kill_capacity = jam_budget == 0.0 ? 0.0 : jam_budget / level;
  const double killed = std::min(kill_capacity, funded);
  st.outage = std::clamp(1.0 - funded + killed, 0.0, 1.0);
  st.jam_spent = killed * level;
  if (detailed) {
    // Hit the most expensive funded frames first (the lowest gains for M = 1),
    // which is the interval representation of the jammed set.
    st.jammed.setZero(n);
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return st.required[a] > st.required[b]; });
    double left = killed;
    for (Index i : order) {
      const double m = st.served[i] * curves.probability(i);
      if (m <= 0.0 || left <= 0.0) continue;
      const double take = std::min(m, left);
      st.jammed[i] = take / curves.probability(i);
      left -= take;
    }
  }
  return st;
}

Eigen::VectorXd sorted_grid(const Eigen::VectorXd& k_grid) {
  if (k_grid.size() == 0) throw ParameterError("K grid is empty");
  Eigen::VectorXd g = k_grid;
  std::sort(g.data(), g.data() + g.size());
  return g;
}

Eigen::VectorXd geometric(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) return Eigen::VectorXd::Constant(1, lo);
  Eigen::VectorXd g(points);
  const double ratio = std::pow(hi / lo, 1.0 / (points - 1));
  for (int k = 0; k < points; ++k) g[k] = k + 1 == points ? hi : lo * std::pow(ratio, k);
  return g;
}

void fill_sets(PureSolution& sol) {
  sol.tx_set.clear();
  sol.jam_set.clear();
  for (Index i = 0; i < sol.served.size(); ++i) {
    if (sol.served[i] > 0.0) sol.tx_set.push_back(i);
    if (sol.jam_power[i] > 0.0) sol.jam_set.push_back(i);
  }
}

PureSolution maximin_detail(const FrameCurves& curves, const SystemParams& params, double level,
                            LevelTable& table) {
  const MaximinState st = maximin_at(curves, params, level, table);
  PureSolution sol;
  sol.level = level;
  sol.outage = st.outage;
  sol.jam_power = st.jam;
  sol.served = st.served;
  sol.tx_power = st.required.cwiseProduct(
      (st.served.array() > 0.0).cast<double>().matrix());
  sol.jammed = (st.jam.array() > 0.0).cast<double>().matrix();
  sol.tx_spent = st.tx_spent;
  sol.jam_spent = st.jam_spent;
  fill_sets(sol);
  return sol;
}

PureSolution minimax_detail(const FrameCurves& curves, const SystemParams& params, double level) {
  const MinimaxState st = minimax_at(curves, params, level, true);
  PureSolution sol;
  sol.level = level;
  sol.outage = st.outage;
  sol.served = st.served;
  sol.jammed = st.jammed;
  sol.tx_power = st.required.cwiseProduct((st.served.array() > 0.0).cast<double>().matrix());
  sol.jam_power = level * (st.jammed.array() > 0.0).cast<double>().matrix();
  sol.tx_spent = st.tx_spent;
  sol.jam_spent = st.jam_spent;
  fill_sets(sol);
  return sol;
}

// Evaluate f on the grid; ties keep the smaller K.
template <class Eval>
std::pair<Eigen::VectorXd, Index> scan(const Eigen::VectorXd& grid, Eval&& eval, bool maximize) {
  Eigen::VectorXd out(grid.size());
  Index best = 0;
  for (Index k = 0; k < grid.size(); ++k) {
    out[k] = eval(grid[k]);
    if (maximize ? out[k] > out[best] : out[k] < out[best]) best = k;
  }
  return {out, best};
}

Eigen::VectorXd with_refinement(const Eigen::VectorXd& grid, Index best, int points) {
  if (grid.size() < 2 || points < 1) return grid;
  const double lo = grid[std::max<Index>(best - 1, 0)];
  const double hi = grid[std::min<Index>(best + 1, grid.size() - 1)];
  std::vector<double> merged(grid.data(), grid.data() + grid.size());
  for (int k = 1; k <= points; ++k) merged.push_back(lo + (hi - lo) * k / (points + 1));
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return Eigen::Map<Eigen::VectorXd>(merged.data(), Index(merged.size()));
}

}  // namespace

PureSolution maximin_solve(const FrameCurves& curves, const SystemParams& params,
                           const Eigen::VectorXd& k_grid, const VaseOptions& options) {
  const Eigen::VectorXd grid = sorted_grid(k_grid);
  LevelTable table(curves, jam_step(curves, params, options));
  auto [outages, best] = scan(
      grid, [&](double k) { return maximin_at(curves, params, k, table).outage; }, true);
  PureSolution sol = maximin_detail(curves, params, grid[best], table);
  sol.k_grid = grid;
  sol.k_outage = outages;
  sol.winner = best;
  return sol;
}

PureSolution minimax_solve(const FrameCurves& curves, const SystemParams& params,
                           const Eigen::VectorXd& k_grid, const VaseOptions& /*options*/) {
  Eigen::VectorXd grid = sorted_grid(k_grid);
  if (params.jam_budget() > 0.0) {
    // K = 0 would divide by zero in the killed mass; drop it.
    std::vector<double> kept;
    for (Index k = 0; k < grid.size(); ++k)
      if (grid[k] > 0.0) kept.push_back(grid[k]);
    if (kept.empty()) throw ParameterError("K grid has no positive level");
    grid = Eigen::Map<Eigen::VectorXd>(kept.data(), Index(kept.size()));
  }
  auto [outages, best] = scan(
      grid, [&](double k) { return minimax_at(curves, params, k, false).outage; }, false);
  PureSolution sol = minimax_detail(curves, params, grid[best]);
  sol.k_grid = grid;
  sol.k_outage = outages;
  sol.winner = best;
  return sol;
}

Eigen::VectorXd maximin_k_grid(const FrameCurves& curves, const SystemParams& params,
                               const VaseOptions& options) {
  double floor_level = kInf;
  for (Index i = 0; i < curves.size(); ++i)
    if (curves.probability(i) > 0.0) floor_level = std::min(floor_level, curves.power(i, 0.0));
  if (!std::isfinite(floor_level)) throw InfeasibleError("no atom can reach the rate");
  if (params.jam_budget() == 0.0) return Eigen::VectorXd::Constant(1, floor_level);

  // Past K_max every jammed frame lies outside the set served without jamming,
  // so the jammer no longer affects the transmitter.
  LevelTable table(curves, jam_step(curves, params, options));
  const MaximinState unjammed = maximin_at(curves, params.with_budgets(params.tx_budget(), 0.0),
                                           floor_level, table);
  auto harmless = [&](double level) {
    const MaximinState st = maximin_at(curves, params, level, table);
    for (Index i = 0; i < curves.size(); ++i)
      if (st.jam[i] > 0.0 && unjammed.served[i] > 0.0) return false;
    return true;
  };
  double top = 2.0 * floor_level;
  for (int i = 0; i < 60 && !harmless(top); ++i) top *= 2.0;
  return geometric(floor_level, top, options.k_points);
}

Eigen::VectorXd minimax_k_grid(const FrameCurves& curves, const SystemParams& params,
                               const VaseOptions& options) {
  const double jam_budget = params.jam_budget();
  if (jam_budget == 0.0) return Eigen::VectorXd::Zero(1);
  auto survivors = [&](double level) {
    const MinimaxState st = minimax_at(curves, params, level, false);
    return 1.0 - st.outage;
  };
  auto funded = [&](double level) {
    Eigen::VectorXd served;
    double spent = 0.0;
    Eigen::VectorXd cost(curves.size());
    for (Index i = 0; i < curves.size(); ++i) cost[i] = curves.power(i, level);
    return buy_cheapest(curves, cost, params.tx_budget(), served, spent);
  };
  // Below K = J every funded frame can be killed. Find some K with survivors,
  // then grow until even the full funded mass cannot beat that.
  double anchor = 2.0 * jam_budget;
  for (int i = 0; i < 60 && survivors(anchor) <= 0.0; ++i) anchor *= 2.0;
  const double target = survivors(anchor);
  double top = anchor;
  for (int i = 0; i < 80 && funded(top) > target; ++i) top *= 2.0;
  return geometric(jam_budget, std::max(top, 2.0 * jam_budget), options.k_points);
}

PureSolution maximin_search(const FrameCurves& curves, const SystemParams& params,
                            const VaseOptions& options) {
  const Eigen::VectorXd grid = maximin_k_grid(curves, params, options);
  const PureSolution coarse = maximin_solve(curves, params, grid, options);
  return maximin_solve(curves, params, with_refinement(grid, coarse.winner, options.refine_points),
                       options);
}

PureSolution minimax_search(const FrameCurves& curves, const SystemParams& params,
                            const VaseOptions& options) {
  const Eigen::VectorXd grid = minimax_k_grid(curves, params, options);
  const PureSolution coarse = minimax_solve(curves, params, grid, options);
  return minimax_solve(curves, params, with_refinement(grid, coarse.winner, options.refine_points),
                       options);
}

}  // namespace jamgame
