#include "jamgame/nocsi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jamgame/errors.hpp"

namespace jamgame {
namespace {

// Cell masses of one block's rate log(1 + h P / (noise + J)): cell n holds
// (n * step, (n + 1) * step], cell 0 also takes the atom at zero rate.
std::vector<double> block_cells(const ChannelDistribution& dist, double tx, double jam,
                                double noise, double step, int count) {
  std::vector<double> cells(count, 0.0);
  if (tx <= 0.0) {
    cells[0] = 1.0;
    return cells;
  }
  const double scale = (noise + jam) / tx;
  auto rate_cdf = [&](double s) { return dist.cdf(std::expm1(s) * scale); };
  double prev = 0.0;
  for (int n = 0; n < count; ++n) {
    const double next = rate_cdf((n + 1) * step);
    cells[n] = next - prev;
    prev = next;
  }
  return cells;
}

std::vector<double> convolve_truncated(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; i + j < n; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

double nocsi_h(double channel_rate, double tx_power, double jam_power, const SystemParams& params) {
  if (!(channel_rate > 0.0)) throw ParameterError("channel rate must be positive");
  if (tx_power < 0.0 || jam_power < 0.0) throw ParameterError("negative power");
  if (tx_power == 0.0) return 1.0;
  const double exponent =
      channel_rate * (params.c() - 1.0) * (jam_power + params.noise_var()) / tx_power;
  return -std::expm1(-exponent);
}

NoCsiResult nocsi_outage_m1(double channel_rate, const SystemParams& params) {
  if (params.blocks() != 1) throw ParameterError("no-CSI closed form needs M = 1");
  NoCsiResult out;
  out.tx_power = params.tx_budget();
  out.jam_power = params.jam_budget();
  out.outage = nocsi_h(channel_rate, out.tx_power, out.jam_power, params);
  return out;
}

NoCsiSaddleReport nocsi_saddle_check(double channel_rate, const SystemParams& params,
                                     const std::vector<double>& offsets) {
  NoCsiSaddleReport report;
  report.offsets = offsets;
  const double tx = params.tx_budget();
  const double jam = params.jam_budget();
  const double value = nocsi_h(channel_rate, tx, jam, params);
  report.worst_tx_slack = std::numeric_limits<double>::infinity();
  report.worst_jam_slack = std::numeric_limits<double>::infinity();
  for (double f : offsets) {
    if (!(f > 0.0 && f <= 1.0)) throw ParameterError("deviation offsets must lie in (0, 1]");
    const double dp = f * tx;
    const double tx_dev = 0.5 * (nocsi_h(channel_rate, tx - dp, jam, params) +
                                 nocsi_h(channel_rate, tx + dp, jam, params));
    report.worst_tx_slack = std::min(report.worst_tx_slack, tx_dev - value);
    if (jam > 0.0) {
      const double dj = f * jam;
      const double jam_dev = 0.5 * (nocsi_h(channel_rate, tx, jam - dj, params) +
                                    nocsi_h(channel_rate, tx, jam + dj, params));
      report.worst_jam_slack = std::min(report.worst_jam_slack, value - jam_dev);
    }
  }
  if (!std::isfinite(report.worst_jam_slack)) report.worst_jam_slack = 0.0;
  if (!std::isfinite(report.worst_tx_slack)) report.worst_tx_slack = 0.0;
  report.passed = report.worst_tx_slack >= 0.0 && report.worst_jam_slack >= 0.0;
  return report;
}

ConvolutionEstimate nocsi_outage_bounds(const ChannelDistribution& dist,
                                        const BlockAllocation& alloc, const SystemParams& params,
                                        const ConvolutionOptions& options) {
  const int blocks = params.blocks();
  if (alloc.tx.size() != blocks || alloc.jam.size() != blocks)
    throw AlignmentError("allocation length differs from the block count");
  if (options.cells < 16) throw ParameterError("too few convolution cells");
  const double noise = params.noise_var();
  ConvolutionEstimate est;

  if (blocks == 1) {
    const double p = alloc.tx[0];
    est.lower = est.upper =
        p > 0.0 ? dist.cdf(std::expm1(params.rate()) * (noise + alloc.jam[0]) / p) : 1.0;
    return est;
  }

  const double target = blocks * params.rate();
  const double step = 4.0 * target / options.cells;
  // Only cells whose index sum can stay at or below the threshold matter.
  const int upper_index = static_cast<int>(std::floor(target / step));
  const int count = upper_index + 1;

  std::vector<double> total = block_cells(dist, alloc.tx[0], alloc.jam[0], noise, step, count);
  for (int m = 1; m < blocks; ++m)
    total = convolve_truncated(total, block_cells(dist, alloc.tx[m], alloc.jam[m], noise, step, count));

  // Lower ends of the cells undershoot the true sum, upper ends overshoot by
  // at most one step per block.
  const int lower_index = static_cast<int>(std::ceil(target / step)) - blocks - 1;
  double acc = 0.0;
  for (int n = 0; n <= upper_index; ++n) {
    acc += total[n];
    if (n == lower_index) est.lower = acc;
  }
  est.upper = std::min(1.0, acc);
  est.lower = std::min(est.lower, est.upper);

  if (est.half_width() > options.tolerance)
    throw ResolutionError("convolution bracket half-width " + std::to_string(est.half_width()) +
                          " exceeds tolerance " + std::to_string(options.tolerance));
  return est;
}

double nocsi_outage_convolution(const ChannelDistribution& dist, const BlockAllocation& alloc,
                                const SystemParams& params, const ConvolutionOptions& options) {
  return nocsi_outage_bounds(dist, alloc, params, options).outage();
}

}  // namespace jamgame
