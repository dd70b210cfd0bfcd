#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "jamgame/errors.hpp"
#include "jamgame/interframe.hpp"
#include "jamgame/numerics.hpp"

namespace jamgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kScanPoints = 400;

void require_single_block(const SystemParams& params) {
  if (params.blocks() != 1) throw ParameterError("closed forms need M = 1");
}

// Portion of an atom with a per-frame cost, for fractional purchases.
struct Lot {
  double cost;
  double mass;
  double gain;
};

// Buys lots cheapest first; returns the bought mass and the gain of the
// marginal lot.
std::pair<double, double> buy(std::vector<Lot> lots, double budget) {
  std::stable_sort(lots.begin(), lots.end(), [](const Lot& a, const Lot& b) { return a.cost < b.cost; });
  double spent = 0.0, mass = 0.0, edge = kInf;
  for (const Lot& lot : lots) {
    if (lot.mass <= 0.0) continue;
    const double price = lot.cost * lot.mass;
    edge = lot.gain;
    if (spent + price <= budget) {
      spent += price;
      mass += lot.mass;
    } else {
      mass += (budget - spent) / lot.cost;
      break;
    }
  }
  return {mass, edge};
}

MaximinClosedForm maximin_discrete(const ChannelDistribution& dist, const SystemParams& params,
                                   double level) {
  const double slope = params.c() - 1.0;
  const double noise = params.noise_var();
  const Eigen::VectorXd& v = dist.atom_values();
  const Eigen::VectorXd& w = dist.atom_probabilities();
  MaximinClosedForm out;
  out.level = level;
  out.jam_low = slope * noise / level;
  out.jam_high = out.jam_low;
  // Jammer lifts frames just above jam_low up to cost K, weakest first.
  std::vector<double> jammed(v.size(), 0.0);
  double left = params.jam_budget();
  for (Index k = 0; k < v.size() && left > 0.0; ++k) {
    if (v[k] <= out.jam_low || w[k] <= 0.0) continue;
    const double cost = w[k] * (v[k] * level / slope - noise);
    jammed[k] = cost <= left ? 1.0 : left / cost;
    left -= std::min(cost, left);
    out.jam_high = v[k];
  }
  std::vector<Lot> lots;
  for (Index k = 0; k < v.size(); ++k) {
    if (v[k] <= 0.0) continue;
    lots.push_back({slope * noise / v[k], w[k] * (1.0 - jammed[k]), v[k]});
    if (jammed[k] > 0.0) lots.push_back({level, w[k] * jammed[k], v[k]});
  }
  const auto [mass, edge] = buy(lots, params.tx_budget());
  out.served_from = edge;
  out.outage = std::clamp(1.0 - mass, 0.0, 1.0);
  return out;
}

MaximinClosedForm maximin_continuous(const ChannelDistribution& dist, const SystemParams& params,
                                     double level) {
  const double slope = params.c() - 1.0;
  const double noise = params.noise_var();
  const double jam_budget = params.jam_budget();
  MaximinClosedForm out;
  out.level = level;
  const double h1 = slope * noise / level;
  out.jam_low = h1;
  auto jam_used = [&](double h2) {
    return dist.expect([&](double h) { return h * level / slope - noise; }, h1, h2);
  };
  if (jam_budget <= 0.0) {
    out.jam_high = h1;
  } else if (jam_used(kInf) <= jam_budget) {
    out.jam_high = kInf;
  } else {
    auto enough = [&](double h2) { return jam_used(h2) >= jam_budget; };
    const double hi = numerics::grow_until(enough, 2.0 * h1);
    out.jam_high = numerics::bisect_first_true(enough, h1, hi, 100);
  }
  const double h2 = out.jam_high;
  auto inverse_cost = [&](double a, double b) {
    return dist.expect([&](double h) { return slope * noise / h; }, a, b);
  };
  // Transmit cost of serving (h0, inf): K on the jammed window, the
  // unjammed requirement elsewhere.
  auto tx_cost = [&](double h0) {
    double cost = inverse_cost(std::max(h0, h2), kInf);
    if (h0 < h2) cost += level * dist.mass(std::max(h0, h1), h2);
    if (h0 < h1) cost += inverse_cost(h0, h1);
    return cost;
  };
  auto affordable = [&](double h0) { return tx_cost(h0) <= params.tx_budget(); };
  // The unjammed cost diverges at h -> 0, so the edge is always interior.
  const double top = numerics::grow_until(affordable, std::max(h1, dist.mean()) * 1e-3);
  out.served_from = numerics::bisect_first_true(affordable, 0.0, top, 100);
  out.outage = dist.cdf(out.served_from);
  return out;
}

MinimaxClosedForm minimax_discrete(const ChannelDistribution& dist, const SystemParams& params,
                                   double level) {
  const double slope = params.c() - 1.0;
  const double noise = params.noise_var();
  const Eigen::VectorXd& v = dist.atom_values();
  const Eigen::VectorXd& w = dist.atom_probabilities();
  std::vector<Lot> lots;
  for (Index k = 0; k < v.size(); ++k)
    if (v[k] > 0.0) lots.push_back({slope * (level + noise) / v[k], w[k], v[k]});
  const auto [funded, edge] = buy(lots, params.tx_budget());
  const double jam_budget = params.jam_budget();
  const double killed = jam_budget == 0.0 ? 0.0 : std::min(funded, jam_budget / level);
  MinimaxClosedForm out;
  out.level = level;
  out.funded_from = edge;
  // The jammed mass starts at the weakest funded frame.
  double left = killed;
  out.jam_to = edge;
  for (Index k = 0; k < v.size() && left > 0.0; ++k) {
    if (v[k] < edge) continue;
    left -= w[k];
    out.jam_to = v[k];
  }
  out.outage = std::clamp(1.0 - funded + killed, 0.0, 1.0);
  return out;
}

MinimaxClosedForm minimax_continuous(const ChannelDistribution& dist, const SystemParams& params,
                                     double level) {
  const double slope = params.c() - 1.0;
  const double noise = params.noise_var();
  const double per_frame = slope * (level + noise);
  auto tx_cost = [&](double hx) {
    return dist.expect([&](double h) { return per_frame / h; }, hx, kInf);
  };
  auto affordable = [&](double hx) { return tx_cost(hx) <= params.tx_budget(); };
  MinimaxClosedForm out;
  out.level = level;
  const double top = numerics::grow_until(affordable, dist.mean() * 1e-3);
  out.funded_from = numerics::bisect_first_true(affordable, 0.0, top, 100);
  const double funded = dist.mass(out.funded_from, kInf);
  const double jam_budget = params.jam_budget();
  const double killed = jam_budget == 0.0 ? 0.0 : std::min(funded, jam_budget / level);
  if (killed >= funded) {
    out.jam_to = kInf;
  } else {
    out.jam_to = dist.quantile(dist.cdf(out.funded_from) + killed);
  }
  out.outage = std::clamp(1.0 - funded + killed, 0.0, 1.0);
  return out;
}

}  // namespace

MaximinClosedForm maximin_m1_at(const ChannelDistribution& dist, const SystemParams& params,
                                double level) {
  require_single_block(params);
  if (!(level > 0.0)) throw ParameterError("K must be positive");
  return dist.is_discrete() ? maximin_discrete(dist, params, level)
                            : maximin_continuous(dist, params, level);
}

MinimaxClosedForm minimax_m1_at(const ChannelDistribution& dist, const SystemParams& params,
                                double level) {
  require_single_block(params);
  if (params.jam_budget() > 0.0 && !(level > 0.0)) throw ParameterError("K must be positive");
  return dist.is_discrete() ? minimax_discrete(dist, params, level)
                            : minimax_continuous(dist, params, level);
}

MaximinClosedForm maximin_m1(const ChannelDistribution& dist, const SystemParams& params) {
  require_single_block(params);
  const double slope = params.c() - 1.0;
  const double noise = params.noise_var();
  if (dist.is_discrete() && dist.atom_values()[dist.atom_values().size() - 1] <= 0.0)
    throw InfeasibleError("every atom has zero gain");
  // K spans from the level that only touches the strongest frames to the
  // level that reaches into the weakest ones.
  const double strong = dist.is_discrete() ? dist.atom_values().maxCoeff() : dist.quantile(1.0 - 1e-9);
  double weak = dist.quantile(1e-6);
  if (!(weak > 0.0)) {
    weak = strong;
    for (Index k = 0; dist.is_discrete() && k < dist.atom_values().size(); ++k)
      if (dist.atom_values()[k] > 0.0) weak = std::min(weak, dist.atom_values()[k]);
  }
  const double lo = slope * noise / strong;
  const double hi = 2.0 * slope * noise / weak;
  if (params.jam_budget() == 0.0) return maximin_m1_at(dist, params, lo);
  auto outage = [&](double k) { return maximin_m1_at(dist, params, k).outage; };
  const auto [level, value] = numerics::scan_and_refine(outage, lo, hi, kScanPoints, true);
  (void)value;
  return maximin_m1_at(dist, params, level);
}

MinimaxClosedForm minimax_m1(const ChannelDistribution& dist, const SystemParams& params) {
  require_single_block(params);
  const double jam_budget = params.jam_budget();
  if (jam_budget == 0.0) return minimax_m1_at(dist, params, 0.0);
  const double hi = 1e6 * (jam_budget + params.noise_var());
  auto outage = [&](double k) { return minimax_m1_at(dist, params, k).outage; };
  const auto [level, value] = numerics::scan_and_refine(outage, jam_budget, hi, kScanPoints, false);
  (void)value;
  return minimax_m1_at(dist, params, level);
}

}  // namespace jamgame
