#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "jamgame/errors.hpp"
#include "jamgame/intraframe.hpp"

using namespace jamgame;

TEST_CASE("mutual information") {
  BlockAllocation a;
  a.tx = Eigen::VectorXd::Zero(1);
  a.jam = Eigen::VectorXd::Zero(1);
  CHECK(mutual_info(ChannelVector{1.0}, a, 1.0) == 0.0);

  a.tx = Eigen::Vector2d(1.0, 1.0);
  a.jam = Eigen::Vector2d(0.0, 1.0);
  CHECK(mutual_info(ChannelVector{1.0, 2.0}, a, 1.0) == doctest::Approx(std::log(2.0)));

  a.tx = Eigen::VectorXd::Constant(1, std::exp(1.0) - 1.0);
  a.jam = Eigen::VectorXd::Zero(1);
  CHECK(mutual_info(ChannelVector{1.0}, a, 1.0) == doctest::Approx(1.0));

  a.jam = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(mutual_info(ChannelVector{1.0}, a, 1.0), AlignmentError);
}

TEST_CASE("nash without a jammer is plain waterfilling") {
  const ChannelVector h{0.5, 1.0, 3.0};
  const FrameSolution s = nash_intraframe(h, 2.0, 0.0, 1.0);
  const double level = s.wf.water_level;
  for (Index m = 0; m < 3; ++m)
    CHECK(s.alloc.tx[m] == doctest::Approx(std::max(0.0, level - 1.0 / h[m])).epsilon(1e-10));
  CHECK(s.alloc.tx_mean() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.alloc.jam.isZero());
}

TEST_CASE("nash with one block has no freedom") {
  const FrameSolution s = nash_intraframe(ChannelVector{2.0}, 3.0, 1.5, 1.0);
  CHECK(s.alloc.tx[0] == doctest::Approx(3.0));
  CHECK(s.alloc.jam[0] == doctest::Approx(1.5));
  CHECK(s.mutual_info == doctest::Approx(std::log1p(2.0 * 3.0 / 2.5)));
}

TEST_CASE("nash meets both budgets and rejects jamming dead channels") {
  const FrameSolution s = nash_intraframe(ChannelVector{1.0, 4.0}, 2.0, 1.0, 1.0);
  CHECK(s.alloc.tx_mean() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.alloc.jam_mean() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.wf.first_tx_block <= s.wf.first_jam_block);
  CHECK_THROWS_AS(nash_intraframe(ChannelVector{0.0, 0.0}, 1.0, 1.0, 1.0), DegenerateChannelError);
}

TEST_CASE("required power closed forms") {
  const SystemParams p(1.0, 1.0, 1);
  const double c = p.c();
  CHECK(required_tx_power(ChannelVector{2.0}, 3.0, p).power == doctest::Approx((c - 1) * 4.0 / 2.0));
  CHECK(required_jam_power(ChannelVector{2.0}, 10.0, p).power ==
        doctest::Approx(2.0 * 10.0 / (c - 1) - 1.0));
  CHECK(required_jam_power(ChannelVector{2.0}, 0.1, p).power == 0.0);

  const SystemParams p2(1.0, 1.0, 2);
  const RequiredPower sym = required_tx_power(ChannelVector{1.0, 1.0}, 0.0, p2);
  CHECK(sym.power == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(sym.alloc.tx[0] == doctest::Approx(sym.alloc.tx[1]));

  CHECK_THROWS_AS(required_tx_power(ChannelVector{0.0, 0.0}, 1.0, p2), InfeasibleError);
}

TEST_CASE("two-block required power against a grid minimization") {
  // h = (1, 4), J_M = 2, R = 1, noise 1: the jammer's best split maximizes
  // the transmitter's requirement, which the solver must match.
  const SystemParams p(1.0, 1.0, 2);
  const ChannelVector h{1.0, 4.0};
  const double target = required_tx_power(h, 2.0, p).power;
  const int n = 10000;
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    BlockAllocation a;
    a.jam = Eigen::Vector2d(4.0 * i / n, 4.0 - 4.0 * i / n);
    // Transmitter answers a fixed jam split by waterfilling on effective gains.
    const ChannelVector eff{h[0] / (1.0 + a.jam[0]), h[1] / (1.0 + a.jam[1])};
    best = std::max(best, required_tx_power(eff, 0.0, p).power);
  }
  CHECK(std::abs(best - target) / target < 1e-4);

  const M2Split split = m2_jammer_split(1.0, 4.0, 2.0, p);
  CHECK(split.jam_weak + split.jam_strong == doctest::Approx(4.0));
}

TEST_CASE("M=2 optimal ratio limits and grid argmax") {
  const double c = std::exp(2.0);
  CHECK(m2_optimal_ratio(3.0, 3.0, c) == doctest::Approx(1.0));
  CHECK(m2_optimal_ratio(0.0, 3.0, c) == doctest::Approx(c));
  CHECK(m2_optimal_ratio(1e-9, 3.0, c) == doctest::Approx(c).epsilon(1e-6));

  const double r_opt = m2_optimal_ratio(1.0, 4.0, c);
  const int n = 100000;
  double best_r = 1.0, best = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double r = 1.0 + (c - 1.0) * i / n;
    const double v = m2_power_at_ratio(r, 1.0, 4.0, 2.0, 1.0, c);
    if (v > best) best = v, best_r = r;
  }
  CHECK(std::abs(best_r - r_opt) <= (c - 1.0) / n);
}

TEST_CASE("duality round trip on random four-block frames") {
  testing::Draws draws(11);
  for (int i = 0; i < 20; ++i) {
    const SystemParams p(draws.uniform(0.3, 1.5), draws.uniform(0.5, 2.0), 4);
    const ChannelVector h(draws.exponential_gains(4, 1.0 / 6.0));
    const double jam = draws.uniform(0.1, 20.0);
    const RequiredPower tx = required_tx_power(h, jam, p);
    const RequiredPower back = required_jam_power(h, tx.power, p);
    CHECK(std::abs(back.power - jam) / jam <= 1e-8);
    CHECK((back.alloc.tx - tx.alloc.tx).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, tx.power));
    CHECK((back.alloc.jam - tx.alloc.jam).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, jam));
  }
}

TEST_CASE("KKT structure report") {
  testing::Draws draws(12);
  const SystemParams p(1.0, 1.0, 4);
  const ChannelVector h(draws.exponential_gains(4, 1.0 / 6.0));
  const RequiredPower r = required_tx_power(h, 3.0, p);
  const KktReport ok = verify_kkt_structure(r.alloc, r.wf, h, p);
  CHECK(ok.passed());

  BlockAllocation bent = r.alloc;
  const Index top = 3;
  bent.tx[top] *= 1.01;
  CHECK_FALSE(verify_kkt_structure(bent, r.wf, h, p)["rate_identity"].passed);

  const SystemParams p1(1.0, 1.0, 1);
  const RequiredPower one = required_tx_power(ChannelVector{2.0}, 1.0, p1);
  const KktReport single = verify_kkt_structure(one.alloc, one.wf, ChannelVector{2.0}, p1);
  CHECK(single.passed());
  CHECK(one.wf.first_tx_block == 0);
  CHECK(one.wf.first_jam_block == 0);
}

TEST_CASE("required power is unique across restarts") {
  // The solver is deterministic; uniqueness shows up as identical answers
  // for permuted copies of the same frame.
  testing::Draws draws(13);
  const SystemParams p(1.0, 1.0, 4);
  Eigen::VectorXd g = draws.exponential_gains(4, 1.0 / 6.0);
  const RequiredPower base = required_tx_power(ChannelVector(g), 2.0, p);
  for (int k = 0; k < 50; ++k) {
    std::shuffle(g.data(), g.data() + g.size(), draws.engine());
    const RequiredPower again = required_tx_power(ChannelVector(g), 2.0, p);
    CHECK((again.alloc.tx - base.alloc.tx).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((again.alloc.jam - base.alloc.jam).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("curves") {
  const SystemParams p1(1.0, 1.0, 1);
  const PJCurve affine = build_pj_curve(ChannelVector{2.0}, CurveGrid::defaults(p1), p1);
  CHECK(affine.is_affine());
  const auto& s = affine.samples;
  const double slope = (s.back().power - s.front().power) / (s.back().jam - s.front().jam);
  CHECK(slope == doctest::Approx((p1.c() - 1.0) / 2.0).epsilon(1e-12));

  // With c < 4 both players start on the strong block of h = (1, 4), which
  // gives an affine prefix before the curve bends.
  const SystemParams p2(0.5, 1.0, 2);
  const PJCurve bent = build_pj_curve(ChannelVector{1.0, 4.0}, CurveGrid::defaults(p2), p2);
  CHECK_FALSE(bent.is_affine());
  CHECK(bent.samples[1].first_tx_block == 1);
  CHECK(bent.samples[1].first_jam_block == 1);
  CHECK(bent.samples.back().first_tx_block == 0);
  for (std::size_t k = 1; k < bent.samples.size(); ++k)
    CHECK(bent.samples[k].power > bent.samples[k - 1].power);
  CHECK(bent.power_at(bent.max_jam()) > 10.0 * bent.power_at(0.0));
  // Final slope never drops below the asymptotic multiplier.
  const auto& t = bent.samples;
  const double last = (t.back().power - t[t.size() - 2].power) / (t.back().jam - t[t.size() - 2].jam);
  CHECK(last >= asymptotic_slope(ChannelVector{1.0, 4.0}, p2) * (1.0 - 1e-9));
  CHECK(bent.jam_at(bent.power_at(3.0)) == doctest::Approx(3.0).epsilon(1e-9));

  CurveGrid bad;
  bad.growth = 1.0;
  CHECK_THROWS_AS(build_pj_curve(ChannelVector{1.0, 4.0}, bad, p2), ParameterError);
}
