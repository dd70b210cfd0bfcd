#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "jamgame/errors.hpp"
#include "jamgame/intraframe.hpp"

namespace jamgame {

namespace {

CurveSample sample_at(const ChannelVector& h, double jam, const SystemParams& params,
                      bool refined) {
  const RequiredPower rp = required_tx_power(h, jam, params);
  return {jam, rp.power, rp.wf.first_tx_block, rp.wf.first_jam_block, rp.wf.water_level,
          rp.wf.jam_multiplier, refined};
}

Index transitions(const CurveSample& a, const CurveSample& b) {
  return std::abs(a.first_tx_block - b.first_tx_block) +
         std::abs(a.first_jam_block - b.first_jam_block);
}

// Bisect [a, b] until neighbouring labels differ by at most one transition.
// Intervals narrower than a millionth of the right end are left alone so
// slope estimates stay well above rounding noise.
void refine(const ChannelVector& h, const SystemParams& params, const CurveSample& a,
            const CurveSample& b, int depth, std::vector<CurveSample>& out) {
  if (depth == 0 || transitions(a, b) <= 1 || b.jam - a.jam <= 1e-6 * b.jam) return;
  const CurveSample mid = sample_at(h, 0.5 * (a.jam + b.jam), params, true);
  refine(h, params, a, mid, depth - 1, out);
  out.push_back(mid);
  refine(h, params, mid, b, depth - 1, out);
}

PJCurve build(const ChannelVector& h, const std::vector<double>& levels,
              const SystemParams& params, bool refine_breaks) {
  if (levels.size() < 2 || levels.front() != 0.0)
    throw ParameterError("curve grid must start at 0 and have at least two levels");
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (!(levels[k] > levels[k - 1])) throw ParameterError("curve grid must be increasing");
  std::vector<CurveSample> base;
  base.reserve(levels.size());
  for (double jam : levels) base.push_back(sample_at(h, jam, params, false));
  PJCurve curve{h, params, {}};
  curve.samples.reserve(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    if (k > 0 && refine_breaks) refine(h, params, base[k - 1], base[k], 40, curve.samples);
    curve.samples.push_back(base[k]);
  }
  return curve;
}

}  // namespace

CurveGrid CurveGrid::defaults(const SystemParams& params) {
  CurveGrid g;
  g.step = params.noise_var() / 10.0;
  return g;
}

PJCurve build_pj_curve(const ChannelVector& h, const CurveGrid& grid, const SystemParams& params) {
  if (!(grid.step > 0.0) || !(grid.growth > 1.0) || grid.points < 2)
    throw ParameterError("curve grid needs step > 0, growth > 1 and at least two points");
  std::vector<double> levels(grid.points);
  for (int k = 0; k < grid.points; ++k) levels[k] = grid.step * (std::pow(grid.growth, k) - 1.0);
  return build(h, levels, params, grid.refine);
}

PJCurve build_pj_curve(const ChannelVector& h, const std::vector<double>& jam_levels,
                       const SystemParams& params) {
  return build(h, jam_levels, params, false);
}

double PJCurve::power_at(double jam) const {
  if (jam < 0.0) throw ParameterError("negative jamming power");
  if (jam > max_jam())
    throw CurveRangeError("jamming power " + std::to_string(jam) + " beyond curve end " +
                          std::to_string(max_jam()));
  auto it = std::lower_bound(samples.begin(), samples.end(), jam,
                             [](const CurveSample& s, double v) { return s.jam < v; });
  if (it == samples.begin()) return it->power;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (jam - lo.jam) / (hi.jam - lo.jam);
  return lo.power + t * (hi.power - lo.power);
}

double PJCurve::jam_at(double power) const {
  if (power <= samples.front().power) return 0.0;
  if (power > samples.back().power)
    throw CurveRangeError("transmit power " + std::to_string(power) + " beyond curve end " +
                          std::to_string(samples.back().power));
  auto it = std::lower_bound(samples.begin(), samples.end(), power,
                             [](const CurveSample& s, double v) { return s.power < v; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (power - lo.power) / (hi.power - lo.power);
  return lo.jam + t * (hi.jam - lo.jam);
}

double PJCurve::integral(double jam) const {
  if (jam > max_jam()) throw CurveRangeError("integral beyond curve end");
  double acc = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const auto& lo = samples[k - 1];
    const auto& hi = samples[k];
    if (hi.jam <= jam) {
      acc += 0.5 * (lo.power + hi.power) * (hi.jam - lo.jam);
    } else {
      if (jam > lo.jam) acc += 0.5 * (lo.power + power_at(jam)) * (jam - lo.jam);
      break;
    }
  }
  return acc;
}

bool PJCurve::is_affine() const { return channel.size() == 1; }

}  // namespace jamgame
