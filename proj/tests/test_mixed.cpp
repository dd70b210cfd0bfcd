#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "jamgame/errors.hpp"
#include "jamgame/interframe.hpp"
#include "jamgame/mixed.hpp"

using namespace jamgame;

TEST_CASE("single-block frame outage") {
  const SystemParams p(1.0, 2.0, 1);
  const double jam = 3.0;
  const double boundary = 1.0 / (1.0 + std::sqrt(1.0 + 2.0 * 2.0 / jam));
  CHECK(frame_outage_m1_boundary(jam, 2.0) == doctest::Approx(boundary).epsilon(1e-14));

  // Power putting the frame exactly on the case boundary.
  const double spread = jam * (1.0 + std::sqrt(1.0 + 2.0 * 2.0 / jam));
  const double h = 1.5;
  const double tx = (0.5 * spread + 2.0) * (p.c() - 1.0) / h;
  CHECK(std::abs(frame_outage_m1(h, tx, jam, p) - boundary) <= 1e-12);

  double prev = 1.0;
  for (double t = 1.0; t < 1e4; t *= 1.5) {
    const double v = frame_outage_m1(h, t, jam, p);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("mixed frame outage is convex in P and concave in J") {
  const SystemParams p(1.0, 2.0, 1);
  const double h = 2.0;
  const int n = 100;
  double worst_p = 0.0, worst_j = 0.0;
  for (int a = 1; a < n - 1; ++a) {
    for (int b = 1; b < n - 1; ++b) {
      const double tx = 0.5 + 0.5 * a, jam = 0.1 + 0.1 * b;
      auto f = [&](double x, double y) { return frame_outage_m1(h, x, y, p); };
      const double dpp = f(tx + 0.5, jam) - 2.0 * f(tx, jam) + f(tx - 0.5, jam);
      const double djj = f(tx, jam + 0.1) - 2.0 * f(tx, jam) + f(tx, jam - 0.1);
      worst_p = std::min(worst_p, dpp);
      worst_j = std::max(worst_j, djj);
    }
  }
  CHECK(worst_p >= -1e-9);
  CHECK(worst_j <= 1e-9);
}

TEST_CASE("general construction agrees with the single-block closed forms") {
  testing::Draws draws(21);
  const SystemParams p(1.0, 2.0, 1);
  for (int i = 0; i < 30; ++i) {
    const double h = draws.uniform(0.3, 5.0);
    const double tx = (p.c() - 1.0) * 2.0 / h * draws.uniform(0.3, 6.0);
    const double jam = draws.uniform(0.2, 6.0);
    const PJCurve curve = build_pj_curve(ChannelVector{h}, CurveGrid::defaults(p), p);
    const MixedFrameStrategy general = frame_mixed_equilibrium(curve, tx, jam);
    const MixedFrameStrategy closed = frame_mixed_m1(h, tx, jam, p);
    CHECK(std::abs(general.v - closed.v) <= 1e-8 * std::max(1.0, closed.v));
    CHECK(std::abs(general.k_p - closed.k_p) <= 1e-8);
    CHECK(std::abs(general.k_j - closed.k_j) <= 1e-8);
    CHECK(general.branch == closed.branch);
    CHECK(std::abs(closed.outage() - frame_outage_m1(h, tx, jam, p)) <= 1e-10);
    CHECK(std::abs(general.tx_mean() - tx) <= 1e-3 * tx);
    CHECK(std::abs(general.jam_mean() - jam) <= 1e-3 * jam);
    CHECK((general.k_p == 1.0 || general.k_j == 1.0));
  }
}

TEST_CASE("mixed frame CDFs") {
  const SystemParams p(1.0, 2.0, 2);
  const PJCurve curve = build_pj_curve(ChannelVector{1.0, 4.0}, CurveGrid::defaults(p), p);
  const MixedFrameStrategy s = frame_mixed_equilibrium(curve, 4.0, 1.0);
  double prev = -1.0;
  for (int k = 0; k <= 200; ++k) {
    const double x = s.top_power() * k / 200.0;
    const double f = s.tx_cdf(x);
    CHECK(f >= prev - 1e-15);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    prev = f;
  }
  CHECK(s.tx_cdf(s.top_power()) == doctest::Approx(1.0));
  CHECK(s.jam_cdf(2.0 * s.v) == doctest::Approx(1.0));
  CHECK(s.tx_mean() == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(s.jam_mean() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(s.v >= 1.0 - 1e-12);
  CHECK(s.v >= curve.jam_at(4.0) / 2.0 - 1e-12);

  CHECK_THROWS_AS(frame_mixed_equilibrium(curve, 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(frame_mixed_equilibrium(curve, 1e9, 1.0), CurveRangeError);
}

TEST_CASE("Monte Carlo play reproduces the frame outage and budgets") {
  const SystemParams p(1.0, 2.0, 1);
  const double h = 1.7, tx = 9.0, jam = 2.5;
  const MixedFrameStrategy s = frame_mixed_m1(h, tx, jam, p);
  std::mt19937_64 rng(77);
  const int n = 1'000'000;
  long lost = 0;
  double tx_sum = 0.0, jam_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = s.draw_tx(rng), b = s.draw_jam(rng);
    tx_sum += a;
    jam_sum += b;
    lost += s.in_outage(a, b);
  }
  const double expected = frame_outage_m1(h, tx, jam, p);
  const double se = std::sqrt(expected * (1.0 - expected) / n);
  CHECK(std::abs(double(lost) / n - expected) <= 3.0 * se);
  // Powers are bounded by the top of the support, which bounds the variance.
  const double tx_se = s.top_power() / std::sqrt(double(n));
  CHECK(std::abs(tx_sum / n - tx) <= 3.0 * tx_se);
  const double jam_se = s.jam(s.top_power()) / std::sqrt(double(n));
  CHECK(std::abs(jam_sum / n - jam) <= 3.0 * jam_se);
}

TEST_CASE("Bayes play inside a frame") {
  const SystemParams p(1.0, 1.0, 2);
  const PJCurve curve = build_pj_curve(ChannelVector{1.0, 4.0}, CurveGrid::defaults(p), p);
  const double tx = 6.0;
  const double matched = curve.jam_at(tx);

  const BayesPlay even = bayes_frame_play(curve, tx, matched);
  CHECK(even.mutual_info == doctest::Approx(p.rate()).epsilon(1e-6));

  const BayesPlay light = bayes_frame_play(curve, tx, 0.5 * matched);
  CHECK_FALSE(light.outage);
  CHECK(light.mutual_info > p.rate());

  const BayesPlay heavy = bayes_frame_play(curve, tx, 1.5 * matched);
  CHECK(heavy.outage);
}

TEST_CASE("first-level profile at the shared parameter point") {
  const auto dist = ChannelDistribution::exponential(1.0 / 6.0);
  const SystemParams p(2.0, 10.0, 1, 20.0, 10.0);
  const FirstLevelProfile prof = mixed_firstlevel_m1(dist, p);

  CHECK(profile_tx_mean(prof, dist) == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(profile_jam_mean(prof, dist) == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(prof.off_threshold ==
        doctest::Approx(prof.tx_multiplier * (p.c() - 1.0) * p.noise_var()).epsilon(1e-12));

  const double edge = prof.case_threshold;
  CHECK(std::abs(prof.tx_power_gated(edge) - prof.tx_power_saturated(edge)) <=
        1e-9 * prof.tx_power_saturated(edge));
  CHECK(std::abs(prof.jam_power_gated(edge) - prof.jam_power_saturated(edge)) <=
        1e-9 * prof.jam_power_saturated(edge));

  for (std::size_t i = 0; i < prof.h.size(); ++i) {
    const bool off = prof.h[i] <= prof.off_threshold;
    CHECK((prof.tx[i] == 0.0) == off);
    CHECK((prof.jam[i] == 0.0) == off);
    if (i > 0 && prof.h[i - 1] > prof.off_threshold && prof.h[i] <= edge)
      CHECK(prof.tx[i] >= prof.tx[i - 1]);
    if (i > 0 && prof.h[i - 1] >= edge) CHECK(prof.tx[i] <= prof.tx[i - 1]);
  }
  CHECK(stationarity_residuals(prof).max_residual <= 1e-8);

  const double outage = overall_outage_mixed_m1(prof, dist, p);
  CHECK(outage == doctest::Approx(0.57486740836183747).epsilon(1e-6));
  CHECK(outage >= maximin_m1(dist, p).outage);
  CHECK(outage <= minimax_m1(dist, p).outage);
}

TEST_CASE("first level with a vanishing jammer is the threshold policy") {
  const auto dist = ChannelDistribution::exponential(1.0 / 6.0);
  const SystemParams p(2.0, 10.0, 1, 20.0, 0.0);
  const FirstLevelProfile prof = mixed_firstlevel_m1(dist, p);
  CHECK(std::isinf(prof.jam_multiplier));
  const double slope = (p.c() - 1.0) * p.noise_var();
  auto spend = [&](double from) {
    return dist.expect([&](double g) { return slope / g; }, from, INFINITY);
  };
  CHECK(spend(prof.off_threshold) == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(overall_outage_mixed_m1(prof, dist, p) ==
        doctest::Approx(dist.cdf(prof.off_threshold)).epsilon(1e-6));
}

TEST_CASE("first-level errors") {
  const auto dist = ChannelDistribution::exponential(1.0 / 6.0);
  CHECK_THROWS_AS(mixed_firstlevel_m1(dist, SystemParams(2.0, 10.0, 1, 0.0, 5.0)), InfeasibleError);
  CHECK_THROWS_AS(mixed_firstlevel_m1(dist, SystemParams(2.0, 10.0, 2, 5.0, 5.0)), ParameterError);
}
