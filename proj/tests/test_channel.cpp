#include <doctest.h>

#include <cmath>
#include <limits>

#include "jamgame/channel.hpp"
#include "jamgame/errors.hpp"

using namespace jamgame;

TEST_CASE("system params derive c and reject bad inputs") {
  const SystemParams p(2.0, 10.0, 3, 20.0, 10.0);
  CHECK(p.c() == doctest::Approx(std::exp(6.0)).epsilon(1e-15));
  CHECK(p.with_budgets(1.0, 2.0).tx_budget() == 1.0);
  CHECK(p.with_blocks(1).c() == doctest::Approx(std::exp(2.0)));
  CHECK_THROWS_AS(SystemParams(0.0, 1.0, 1), ParameterError);
  CHECK_THROWS_AS(SystemParams(1.0, 0.0, 1), ParameterError);
  CHECK_THROWS_AS(SystemParams(1.0, 1.0, 0), ParameterError);
  CHECK_THROWS_AS(SystemParams(1.0, 1.0, 1, -1.0, 0.0), ParameterError);
}

TEST_CASE("channel vector sorts stably and scatters back") {
  const ChannelVector h{3.0, 1.0, 3.0, 0.5};
  CHECK(h[0] == 0.5);
  CHECK(h[3] == 3.0);
  CHECK(h.order() == std::vector<Index>{3, 1, 0, 2});
  Eigen::VectorXd sorted(4);
  sorted << 10, 11, 12, 13;
  const Eigen::VectorXd back = h.to_original(sorted);
  CHECK(back[3] == 10);
  CHECK(back[0] == 12);
  CHECK(back[2] == 13);
  CHECK_THROWS_AS(ChannelVector{-1.0}, ParameterError);
  CHECK_THROWS_AS(h.to_original(Eigen::VectorXd::Zero(2)), AlignmentError);
}

TEST_CASE("distributions") {
  const auto e = ChannelDistribution::exponential(1.0 / 6.0);
  CHECK(e.mean() == doctest::Approx(6.0));
  CHECK(e.cdf(6.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(e.quantile(e.cdf(3.0)) == doctest::Approx(3.0));
  CHECK(e.mass(1.0, 2.0) == doctest::Approx(e.cdf(2.0) - e.cdf(1.0)));

  Eigen::VectorXd v(3), w(3);
  v << 3.0, 1.0, 2.0;
  w << 0.2, 0.5, 0.3;
  const auto d = ChannelDistribution::discrete(v, w);
  CHECK(d.atom_values()[0] == 1.0);
  CHECK(d.cdf(1.5) == doctest::Approx(0.5));
  CHECK(d.mean() == doctest::Approx(0.5 + 0.6 + 0.6));
  CHECK(d.expect([](double h) { return h * h; }, 1.0, 3.0) == doctest::Approx(0.3 * 4 + 0.2 * 9));
  w[0] = 0.3;
  CHECK_THROWS_AS(ChannelDistribution::discrete(v, w), ParameterError);
  CHECK_THROWS_AS(ChannelDistribution::exponential(-1.0), ParameterError);
}

TEST_CASE("sampling is deterministic per seed") {
  const auto e = ChannelDistribution::exponential(1.0 / 6.0);
  const ChannelVector a = sample_channel(e, 1, 99);
  const ChannelVector b = sample_channel(e, 1, 99);
  CHECK(a[0] >= 0.0);
  CHECK(a[0] == b[0]);

  Eigen::VectorXd v(1), w(1);
  v << 2.0;
  w << 1.0;
  const ChannelVector single = sample_channel(ChannelDistribution::discrete(v, w), 3, 5);
  CHECK(single.values() == Eigen::Vector3d(2.0, 2.0, 2.0));
}

TEST_CASE("law of large numbers on a million draws") {
  const auto e = ChannelDistribution::exponential(1.0 / 6.0);
  const ChannelVector many = sample_channel(e, 1'000'000, 2024);
  CHECK(std::abs(many.values().mean() - 6.0) / 6.0 < 0.01);
}

TEST_CASE("exponential discretization") {
  CHECK_THROWS_AS(discretize_exponential(1.0 / 6.0, 2, std::numeric_limits<double>::infinity()),
                  ParameterError);
  CHECK_THROWS_AS(discretize_exponential(1.0 / 6.0, 1, 60.0), ParameterError);

  const auto space = discretize_exponential(1.0 / 6.0, 400, 60.0);
  CHECK(space.size() == 400);
  CHECK(std::abs(space.mass.sum() - 1.0) < 1e-9);
  CHECK(space.tail_mass == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
  CHECK(space.mass[space.size() - 1] == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
  double mean = 0.0;
  for (Index i = 0; i < space.size(); ++i) mean += space.mass[i] * space.states[i][0];
  CHECK(std::abs(mean - 6.0) / 6.0 < 0.005);
  CHECK(space.states.back()[0] == doctest::Approx(66.0));

  const auto product = discretize_exponential(1.0 / 6.0, 50, 60.0, 2);
  CHECK(product.size() == 2500);
  CHECK(std::abs(product.mass.sum() - 1.0) < 1e-9);
  for (const auto& s : product.states) CHECK(s[0] <= s[1]);

  CHECK_THROWS_AS(discretize_exponential(1.0 / 6.0, 400, 60.0, 3, 1000), CapacityError);
}

TEST_CASE("atom space") {
  Eigen::VectorXd v(2), w(2);
  v << 1.0, 4.0;
  w << 0.25, 0.75;
  const auto space = discrete_space(ChannelDistribution::discrete(v, w), 2);
  CHECK(space.size() == 4);
  CHECK(space.mass.sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(discrete_space(ChannelDistribution::exponential(1.0)), ParameterError);
}
