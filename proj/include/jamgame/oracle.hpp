#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jamgame/channel.hpp"
#include "jamgame/interframe.hpp"
#include "jamgame/intraframe.hpp"
#include "jamgame/mixed.hpp"

namespace jamgame {

// Outcome of one brute-force check. A failing report names the offending input.
struct OracleReport {
  std::string name;
  bool passed = true;
  double worst_residual = 0.0;
  std::string witness;
  std::uint64_t seed = 0;

  // "name PASS|FAIL residual=... [witness]"
  std::string to_line() const;
};

inline constexpr long long kSaddleGridCap = 5'000'000;

// Enumerates every split of each player's frame budget into `resolution`
// equal quanta over the blocks and reports the largest unilateral gain in
// mutual information against `alloc`.
OracleReport grid_saddle_check(const ChannelVector& h, const BlockAllocation& alloc,
                               const SystemParams& params, int resolution,
                               double tolerance = 1e-9);

// Same, with the candidate taken from the within-frame Nash solver.
OracleReport grid_saddle_check(const ChannelVector& h, double tx_mean, double jam_mean,
                               const SystemParams& params, int resolution,
                               double tolerance = 1e-9);

struct ExhaustiveOptions {
  double tx_quantum = 0.0;   // absolute spend quantum; 0 means tx budget / 20
  double jam_quantum = 0.0;  // same for the jammer
  std::vector<double> levels;      // per-atom jam levels offered to the transmitter
  long long cap = 100'000'000;     // evaluations before CapacityError
};

struct ExhaustiveResult {
  double maximin_outage = 0.0;
  Eigen::VectorXd maximin_jam;  // per-atom jamming of the best jammer allocation
  double minimax_outage = 1.0;
  Eigen::VectorXd minimax_tx;      // per-atom expected spend of the best transmitter allocation
  Eigen::VectorXd minimax_levels;  // per-atom jam level protecting each funded atom
  long long evaluations = 0;
};

// Exact optima over quantized allocations. Jammer-first: every per-atom
// jamming split in quanta, transmitter answers by buying the cheapest frames.
// Transmitter-first: every spend split in quanta times every per-atom level
// choice, jammer answers by killing the cheapest protected frames.
ExhaustiveResult exhaustive_interframe(const FrameCurves& curves, const SystemParams& params,
                                       const ExhaustiveOptions& options);

// Strictly increasing, concave required-power curve.
OracleReport shape_check(const PJCurve& curve, double tolerance = 1e-9);

// Pieces where both players start on the same block are affine; the others
// bend strictly.
OracleReport segment_label_check(const PJCurve& curve, double tolerance = 1e-9);

// Budget-preserving rescalings of one side's first-level profile: the
// transmitter's must not lower expected outage, the jammer's must not raise it.
OracleReport deviation_check(const FirstLevelProfile& profile, const ChannelDistribution& dist,
                             const SystemParams& params, const std::vector<double>& epsilons,
                             double tolerance = 1e-6);

}  // namespace jamgame
