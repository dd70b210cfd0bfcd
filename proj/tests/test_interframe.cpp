#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jamgame/errors.hpp"
#include "jamgame/interframe.hpp"
#include "jamgame/oracle.hpp"

using namespace jamgame;

namespace {

ChannelDistribution three_atoms() {
  Eigen::VectorXd h(3), w(3);
  h << 1.0, 3.0, 8.0;
  w << 0.3, 0.4, 0.3;
  return ChannelDistribution::discrete(h, w);
}

ChannelDistribution four_atoms() {
  Eigen::VectorXd h(4), w(4);
  h << 0.5, 2.0, 5.0, 12.0;
  w << 0.25, 0.25, 0.3, 0.2;
  return ChannelDistribution::discrete(h, w);
}

// Transmitter alone: buy the cheapest frames, fractionally at the margin.
double threshold_outage(const ChannelDistribution& dist, const SystemParams& p) {
  const auto& h = dist.atom_values();
  const auto& w = dist.atom_probabilities();
  double budget = p.tx_budget(), served = 0.0;
  for (Index i = h.size() - 1; i >= 0; --i) {
    const double cost = (p.c() - 1.0) * p.noise_var() / h[i] * w[i];
    const double frac = std::min(1.0, budget / cost);
    served += frac * w[i];
    budget -= frac * cost;
    if (frac < 1.0) break;
  }
  return 1.0 - served;
}

std::vector<double> geometric_levels(double jam_budget, int count) {
  std::vector<double> levels;
  for (int k = 0; k < count; ++k)
    levels.push_back(jam_budget / 4.0 * std::pow(256.0, k / double(count - 1)));
  return levels;
}

}  // namespace

TEST_CASE("without a jammer both pure solutions reduce to the threshold policy") {
  const auto dist = three_atoms();
  const SystemParams p(1.0, 2.0, 1, 8.0, 0.0);
  const FrameCurves curves(discrete_space(dist), p);
  const double expected = threshold_outage(dist, p);
  CHECK(maximin_search(curves, p).outage == doctest::Approx(expected).epsilon(1e-9));
  CHECK(minimax_search(curves, p).outage == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("empty K grid is rejected") {
  const SystemParams p(1.0, 2.0, 1, 8.0, 1.0);
  const FrameCurves curves(discrete_space(three_atoms()), p);
  CHECK_THROWS_AS(maximin_solve(curves, p, Eigen::VectorXd()), ParameterError);
  CHECK_THROWS_AS(minimax_solve(curves, p, Eigen::VectorXd()), ParameterError);
}

TEST_CASE("three-atom maximin against brute force at a fine jamming quantum") {
  const SystemParams p(1.0, 2.0, 1, 20.0, 10.0);
  const FrameCurves curves(discrete_space(three_atoms()), p);
  ExhaustiveOptions opt;
  opt.jam_quantum = p.jam_budget() / 100.0;
  opt.tx_quantum = p.tx_budget() / 10.0;
  opt.levels = geometric_levels(p.jam_budget(), 6);
  const double slack = 3.0 * opt.jam_quantum;
  const double solver = maximin_search(curves, p).outage;
  const double lo = exhaustive_interframe(curves, p, opt).maximin_outage;
  const double hi =
      exhaustive_interframe(curves, p.with_budgets(p.tx_budget(), p.jam_budget() + slack), opt)
          .maximin_outage;
  CHECK(lo <= solver + 1e-9);
  CHECK(solver <= hi + 1e-9);
}

TEST_CASE("four-atom minimax against brute force") {
  const SystemParams p(1.0, 2.0, 1, 20.0, 10.0);
  const FrameCurves curves(discrete_space(four_atoms()), p);
  ExhaustiveOptions opt;
  opt.tx_quantum = p.tx_budget() / 10.0;
  opt.jam_quantum = p.jam_budget() / 10.0;
  opt.levels = geometric_levels(p.jam_budget(), 10);
  const double slack = 4.0 * opt.tx_quantum;
  const double solver = minimax_search(curves, p).outage;
  const double hi = exhaustive_interframe(curves, p, opt).minimax_outage;
  const double lo =
      exhaustive_interframe(curves, p.with_budgets(p.tx_budget() + slack, p.jam_budget()), opt)
          .minimax_outage;
  CHECK(solver <= hi + 1e-9);
  CHECK(lo <= solver + 1e-9);
}

TEST_CASE("pure sweep: maximin non-increasing in the transmit budget and below minimax") {
  const SystemParams base(2.0, 10.0, 1, 0.0, 10.0);
  const auto space = discretize_exponential(1.0 / 6.0, 100, 60.0);
  const FrameCurves curves(space, base);
  double prev = 1.0;
  for (double tx = 2.0; tx <= 30.0; tx += 4.0) {
    const SystemParams p = base.with_budgets(tx, 10.0);
    const PureSolution mm = maximin_search(curves, p);
    const PureSolution mx = minimax_search(curves, p);
    CHECK(mm.outage <= prev + 1e-9);
    CHECK(mx.outage >= mm.outage - 1e-9);
    CHECK(mm.outage >= 0.0);
    CHECK(mx.outage <= 1.0);
    CHECK(mm.tx_spent <= tx * (1.0 + 1e-9));
    CHECK(mm.jam_spent <= 10.0 * (1.0 + 1e-3));
    CHECK(mm.k_grid.size() == mm.k_outage.size());
    CHECK(mm.k_outage[mm.winner] == doctest::Approx(mm.outage));
    prev = mm.outage;
  }
}

TEST_CASE("maximin greedy admits no improving single-quantum exchange at fixed K") {
  Eigen::VectorXd h(3), w(3);
  h << 0.8, 2.0, 5.0;
  w << 0.3, 0.3, 0.4;
  const SystemParams p(0.5, 1.0, 2, 6.0, 2.0);
  const auto space = discrete_space(ChannelDistribution::discrete(h, w), 2);
  const FrameCurves curves(space, p);
  VaseOptions opt;
  opt.jam_quantum_fraction = 0.01;
  const PureSolution ref = maximin_search(curves, p, opt);
  const double level = ref.level;
  const PureSolution sol = maximin_solve(curves, p, Eigen::VectorXd::Constant(1, level), opt);
  const double q = opt.jam_quantum_fraction * p.jam_budget();

  auto total = [&](const Eigen::VectorXd& jam) {
    double acc = 0.0;
    for (Index i = 0; i < curves.size(); ++i) acc += curves.probability(i) * curves.power(i, jam[i]);
    return acc;
  };
  const double base = total(sol.jam_power);
  double worst_gain = 0.0;
  for (Index from = 0; from < curves.size(); ++from) {
    if (sol.jam_power[from] * curves.probability(from) < q) continue;
    for (Index to = 0; to < curves.size(); ++to) {
      if (to == from) continue;
      Eigen::VectorXd moved = sol.jam_power;
      moved[from] -= q / curves.probability(from);
      moved[to] += q / curves.probability(to);
      if (curves.power(to, moved[to]) > level) continue;
      worst_gain = std::max(worst_gain, total(moved) - base);
    }
  }
  CHECK(worst_gain <= 1e-9 * base);
}

TEST_CASE("single-block closed forms") {
  const auto dist = ChannelDistribution::exponential(1.0 / 6.0);
  const SystemParams p(2.0, 10.0, 1, 20.0, 10.0);

  SUBCASE("pinned values at the shared parameter point") {
    CHECK(maximin_m1(dist, p).outage == doctest::Approx(0.35160404802309952).epsilon(1e-6));
    CHECK(minimax_m1(dist, p).outage == doctest::Approx(0.74857112175116947).epsilon(1e-6));
  }

  SUBCASE("no jammer") {
    const SystemParams q = p.with_budgets(20.0, 0.0);
    const MaximinClosedForm mm = maximin_m1(dist, q);
    CHECK(mm.jam_high == doctest::Approx(mm.jam_low));
    const double slope = (q.c() - 1.0) * q.noise_var();
    const double spend = dist.expect([&](double g) { return slope / g; }, mm.served_from, INFINITY);
    CHECK(spend == doctest::Approx(20.0).epsilon(1e-6));
    CHECK(mm.outage == doctest::Approx(dist.cdf(mm.served_from)).epsilon(1e-9));

    const MinimaxClosedForm mx = minimax_m1(dist, q);
    CHECK(mx.jam_to == doctest::Approx(mx.funded_from));
  }

  SUBCASE("evaluations at fixed K") {
    // A huge K leaves the jammer a set of mass J / K.
    const MinimaxClosedForm far = minimax_m1_at(dist, p, 1e6);
    CHECK(dist.mass(far.funded_from, far.jam_to) == doctest::Approx(10.0 / 1e6).epsilon(1e-6));
    const MaximinClosedForm mid = maximin_m1_at(dist, p, 100.0);
    CHECK(mid.jam_low == doctest::Approx((p.c() - 1.0) * p.noise_var() / 100.0));
    CHECK(maximin_m1_at(dist, p, 100.0).outage <= maximin_m1(dist, p).outage + 1e-9);
    CHECK(minimax_m1_at(dist, p, 100.0).outage >= minimax_m1(dist, p).outage - 1e-9);
  }

  CHECK_THROWS_AS(maximin_m1(dist, p.with_blocks(2)), ParameterError);
}
