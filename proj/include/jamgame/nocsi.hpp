#pragma once

#include <vector>

#include "jamgame/channel.hpp"
#include "jamgame/intraframe.hpp"

namespace jamgame {

// Outage when neither side sees the channel and both spread their budgets
// evenly over every frame. Exponential single-block channel with rate
// `channel_rate`; a zero transmit budget is outage 1 by convention.
double nocsi_h(double channel_rate, double tx_power, double jam_power, const SystemParams& params);

struct NoCsiResult {
  double outage = 1.0;
  double tx_power = 0.0;   // spent in every frame
  double jam_power = 0.0;
};

NoCsiResult nocsi_outage_m1(double channel_rate, const SystemParams& params);

struct NoCsiSaddleReport {
  bool passed = true;
  double worst_tx_slack = 0.0;   // min over deviations of E[H] - H at the equilibrium
  double worst_jam_slack = 0.0;  // min over deviations of H - E[H]
  std::vector<double> offsets;   // deviation half-widths, as budget fractions
};

// Tests two-point mean-preserving deviations {budget - d, budget + d} for
// each side. `offsets` are fractions of the deviating side's budget in (0, 1].
NoCsiSaddleReport nocsi_saddle_check(double channel_rate, const SystemParams& params,
                                     const std::vector<double>& offsets);

struct ConvolutionOptions {
  int cells = 1 << 14;      // cells on the rate axis [0, 4 M R]
  double tolerance = 1e-3;  // allowed half-width of the outage bracket
};

// Bracket on Pr(sum of block rates < M R) from the cell discretization.
struct ConvolutionEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double outage() const { return 0.5 * (lower + upper); }
  double half_width() const { return 0.5 * (upper - lower); }
};

// Outage of a fixed allocation whose blocks see i.i.d. gains from `dist`.
// Throws ResolutionError when the bracket is wider than requested.
ConvolutionEstimate nocsi_outage_bounds(const ChannelDistribution& dist,
                                        const BlockAllocation& alloc, const SystemParams& params,
                                        const ConvolutionOptions& options = {});

double nocsi_outage_convolution(const ChannelDistribution& dist, const BlockAllocation& alloc,
                                const SystemParams& params, const ConvolutionOptions& options = {});

}  // namespace jamgame
