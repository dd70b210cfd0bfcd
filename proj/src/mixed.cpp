#include "jamgame/mixed.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "jamgame/errors.hpp"

namespace jamgame {
namespace {

// Relative size of S(v0) treated as exactly zero.
constexpr double kBalancedTolerance = 1e-12;

struct CurveHandles {
  std::function<double(double)> power;
  std::function<double(double)> jam;
  std::function<double(double)> integral;  // of power over [0, y]
  double max_jam = std::numeric_limits<double>::infinity();
};

void require_positive_budgets(double tx_budget, double jam_budget) {
  if (!(tx_budget > 0.0) || !(jam_budget > 0.0))
    throw ParameterError("mixed frame strategy needs positive budgets, got P=" +
                         std::to_string(tx_budget) + " J=" + std::to_string(jam_budget));
}

// Doubles hi from `start` until pred(hi); 2*hi must stay on the curve.
template <class Pred>
double bracket_up(Pred&& pred, double start, const CurveHandles& curve) {
  double hi = start;
  while (!pred(hi)) {
    hi *= 2.0;
    if (2.0 * hi > curve.max_jam)
      throw CurveRangeError("mixed strategy support exceeds the sampled curve; extend the grid");
  }
  return hi;
}

MixedFrameStrategy construct(const CurveHandles& curve, double a, double b) {
  require_positive_budgets(a, b);
  if (a >= curve.power(curve.max_jam))
    throw CurveRangeError("frame power " + std::to_string(a) + " beyond curve end");

  MixedFrameStrategy out;
  out.tx_budget = a;
  out.jam_budget = b;
  out.power = curve.power;
  out.jam = curve.jam;

  auto balance = [&](double v) { return (curve.power(2.0 * v) - a) * (2.0 * v - b) - a * b; };
  const double lo = 0.5 * std::max(b, curve.jam(a));
  const double hi = bracket_up([&](double v) { return balance(v) > 0.0; }, 2.0 * lo, curve);
  const double v0 = numerics::bisect_first_true([&](double v) { return balance(v) > 0.0; }, lo, hi);

  auto surplus = [&](double v) { return curve.integral(2.0 * v) - 2.0 * v * a; };
  const double s0 = surplus(v0);

  if (std::abs(s0) <= kBalancedTolerance * 2.0 * v0 * a) {
    out.v = v0;
    out.k_p = 1.0;
    out.k_j = 1.0;
    out.branch = MixedBranch::BothAlwaysOn;
  } else if (s0 < 0.0) {
    // Transmitter always on; its mean pins v.
    auto pred = [&](double v) { return surplus(v) >= 0.0; };
    const double v = numerics::bisect_first_true(pred, v0, bracket_up(pred, 2.0 * v0, curve));
    const double top = curve.power(2.0 * v);
    out.v = v;
    out.k_p = 1.0;
    out.k_j = std::min(1.0, b * top / (2.0 * v * (top - a)));
    out.branch = MixedBranch::TxAlwaysOn;
  } else {
    // Jammer always on; its mean pins v.
    auto residual = [&](double v) {
      return curve.integral(2.0 * v) - curve.power(2.0 * v) * (2.0 * v - b);
    };
    auto pred = [&](double v) { return residual(v) <= 0.0; };
    const double v = numerics::bisect_first_true(pred, v0, bracket_up(pred, 2.0 * v0, curve));
    out.v = v;
    out.k_p = std::min(1.0, 2.0 * v * a / (curve.power(2.0 * v) * (2.0 * v - b)));
    out.k_j = 1.0;
    out.branch = MixedBranch::JammerAlwaysOn;
  }
  out.power_integral = curve.integral(2.0 * out.v);
  return out;
}

double stable_jam_width(double jam, double noise) {
  // J (1 + sqrt(1 + 2 noise / J)), finite at J = 0.
  return jam + std::sqrt(jam * jam + 2.0 * jam * noise);
}

void require_single_block(const SystemParams& params) {
  if (params.blocks() != 1) throw ParameterError("single-block closed form called with M > 1");
}

}  // namespace

double MixedFrameStrategy::tx_cdf(double p) const {
  if (p < 0.0) return 0.0;
  const double top = top_power();
  if (p >= top) return 1.0;
  const double silent = 1.0 - k_p;
  if (p < power(0.0)) return silent;
  return silent + k_p * jam(p) / (2.0 * v);
}

double MixedFrameStrategy::jam_cdf(double j) const {
  if (j < 0.0) return 0.0;
  if (j >= 2.0 * v) return 1.0;
  return 1.0 - k_j + k_j * power(j) / top_power();
}

double MixedFrameStrategy::tx_mean() const { return k_p * power_integral / (2.0 * v); }

double MixedFrameStrategy::jam_mean() const {
  const double top = top_power();
  return k_j * (2.0 * v * top - power_integral) / top;
}

double MixedFrameStrategy::outage() const {
  return 1.0 - k_p + k_p * k_j * (1.0 - power_integral / (2.0 * v * top_power()));
}

MixedFrameStrategy frame_mixed_equilibrium(const PJCurve& curve, double tx_budget,
                                           double jam_budget) {
  auto shared = std::make_shared<const PJCurve>(curve);
  CurveHandles handles;
  handles.power = [shared](double j) { return shared->power_at(j); };
  handles.jam = [shared](double p) { return shared->jam_at(p); };
  handles.integral = [shared](double j) { return shared->integral(j); };
  handles.max_jam = shared->max_jam();
  return construct(handles, tx_budget, jam_budget);
}

MixedFrameStrategy frame_mixed_m1(double h, double tx_budget, double jam_budget,
                                  const SystemParams& params) {
  require_single_block(params);
  require_positive_budgets(tx_budget, jam_budget);
  if (!(h > 0.0)) throw DegenerateChannelError("zero channel gain");
  const double noise = params.noise_var();
  const double slope = (params.c() - 1.0) / h;
  const double x = tx_budget / slope;
  const double width = stable_jam_width(jam_budget, noise);
  const double boundary = 0.5 * width + noise;

  MixedFrameStrategy out;
  out.tx_budget = tx_budget;
  out.jam_budget = jam_budget;
  out.power = [slope, noise](double j) { return slope * (j + noise); };
  out.jam = [slope, noise](double p) { return std::max(0.0, p / slope - noise); };

  if (x <= boundary * (1.0 + kBalancedTolerance)) {
    out.v = 0.5 * width;
    out.k_p = std::min(1.0, 2.0 * out.v * tx_budget /
                                (slope * (2.0 * out.v + noise) * (2.0 * out.v - jam_budget)));
    out.k_j = 1.0;
    out.branch = x >= boundary * (1.0 - kBalancedTolerance) ? MixedBranch::BothAlwaysOn
                                                           : MixedBranch::JammerAlwaysOn;
  } else {
    const double excess = tx_budget - slope * noise;
    out.v = excess / slope;
    out.k_p = 1.0;
    out.k_j = slope * jam_budget * (2.0 * tx_budget - slope * noise) / (2.0 * excess * excess);
    out.branch = MixedBranch::TxAlwaysOn;
  }
  out.power_integral = slope * 2.0 * out.v * (out.v + noise);
  return out;
}

double frame_outage_m1(double h, double tx_budget, double jam_budget, const SystemParams& params) {
  require_single_block(params);
  if (tx_budget < 0.0 || jam_budget < 0.0) throw ParameterError("negative frame budget");
  if (!(h > 0.0) || tx_budget == 0.0) return 1.0;
  const double noise = params.noise_var();
  const double x = h * tx_budget / (params.c() - 1.0);
  const double width = stable_jam_width(jam_budget, noise);
  if (x <= 0.5 * width + noise) return 1.0 - x / (width + noise);
  return 0.5 * jam_budget / (x - noise);
}

double frame_outage_m1_boundary(double jam_budget, double noise_var) {
  return 1.0 / (1.0 + std::sqrt(1.0 + 2.0 * noise_var / jam_budget));
}

BayesPlay bayes_frame_play(const PJCurve& curve, double tx_draw, double jam_draw) {
  const double noise = curve.params.noise_var();
  const Index blocks = curve.channel.size();
  BayesPlay out;

  if (tx_draw > 0.0) {
    const double presumed_jam = curve.jam_at(tx_draw);
    out.tx = nash_intraframe(curve.channel, tx_draw, presumed_jam, noise).alloc;
  } else {
    out.tx.tx = Eigen::VectorXd::Zero(blocks);
    out.tx.jam = Eigen::VectorXd::Zero(blocks);
  }
  const double presumed_power = curve.power_at(jam_draw);
  out.jam = nash_intraframe(curve.channel, presumed_power, jam_draw, noise).alloc;

  out.mutual_info = mutual_info(curve.channel.values(), out.tx.tx, out.jam.jam, noise);
  out.outage = tx_draw <= 0.0 || jam_draw >= curve.jam_at(tx_draw);
  return out;
}

}  // namespace jamgame
