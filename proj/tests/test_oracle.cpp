#include <doctest.h>

#include <cmath>

#include "jamgame/errors.hpp"
#include "jamgame/oracle.hpp"

using namespace jamgame;

TEST_CASE("grid saddle check") {
  const SystemParams p(1.0, 1.0, 2);
  const ChannelVector h{1.0, 4.0};

  const OracleReport nash = grid_saddle_check(h, 2.0, 1.0, p, 400);
  CHECK(nash.passed);
  CHECK(nash.worst_residual <= 1e-9);

  BlockAllocation bent = nash_intraframe(h, 2.0, 1.0, 1.0).alloc;
  bent.tx[0] += 0.3;
  bent.tx[1] -= 0.3;
  const OracleReport bad = grid_saddle_check(h, bent, p, 100);
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst_residual > 0.0);
  CHECK_FALSE(bad.witness.empty());
  CHECK(bad.to_line().find("FAIL") != std::string::npos);

  const OracleReport single = grid_saddle_check(ChannelVector{2.0}, 1.0, 1.0, p.with_blocks(1), 50);
  CHECK(single.passed);

  const ChannelVector five{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK_THROWS_AS(grid_saddle_check(five, 1.0, 1.0, p.with_blocks(5), 10), CapacityError);
  CHECK_THROWS_AS(grid_saddle_check(ChannelVector{1.0, 2.0, 3.0, 4.0}, 1.0, 1.0, p.with_blocks(4), 1000),
                  CapacityError);
}

TEST_CASE("exhaustive search on a single vase") {
  const SystemParams p(1.0, 1.0, 1, 4.0, 2.0);
  Eigen::VectorXd h(1), w(1);
  h << 2.0;
  w << 1.0;
  const FrameCurves curves(discrete_space(ChannelDistribution::discrete(h, w)), p);
  ExhaustiveOptions opt;
  opt.levels = {0.5, 1.0, 2.0, 4.0};
  const ExhaustiveResult r = exhaustive_interframe(curves, p, opt);
  const double need = (p.c() - 1.0) * (2.0 + 1.0) / 2.0;
  CHECK(r.maximin_outage == doctest::Approx(1.0 - std::min(1.0, 4.0 / need)));
  CHECK(r.minimax_outage >= r.maximin_outage - 1e-12);

  ExhaustiveOptions tiny = opt;
  tiny.cap = 1;
  CHECK_THROWS_AS(exhaustive_interframe(curves, p, tiny), CapacityError);
}

TEST_CASE("shape and segment checks") {
  const SystemParams p(1.0, 1.0, 2);
  const PJCurve curve = build_pj_curve(ChannelVector{1.0, 4.0}, CurveGrid::defaults(p), p);
  CHECK(shape_check(curve).passed);
  CHECK(segment_label_check(curve).passed);

  PJCurve convex = curve;
  for (auto& s : convex.samples) s.power = 1.0 + s.jam * s.jam;
  const OracleReport r = shape_check(convex);
  CHECK_FALSE(r.passed);
  CHECK(r.witness.find("sample") != std::string::npos);
}

TEST_CASE("deviation check around the first-level equilibrium") {
  const auto dist = ChannelDistribution::exponential(1.0 / 6.0);
  const SystemParams p(2.0, 10.0, 1, 20.0, 10.0);
  const FirstLevelProfile prof = mixed_firstlevel_m1(dist, p);
  CHECK(deviation_check(prof, dist, p, {0.01, 0.05, 0.1}).passed);

  FirstLevelProfile off = prof;
  off.jam_multiplier *= 1.1;
  CHECK_FALSE(deviation_check(off, dist, p, {0.05}).passed);
}
