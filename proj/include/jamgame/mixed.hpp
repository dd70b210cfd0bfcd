#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "jamgame/channel.hpp"
#include "jamgame/intraframe.hpp"
#include "jamgame/numerics.hpp"

namespace jamgame {

enum class MixedBranch { TxAlwaysOn, BothAlwaysOn, JammerAlwaysOn };

// Equilibrium mixture for frames sharing one channel realization.
//
// With probability k_p the transmitter draws y uniform on [0, 2v] and spends
// power(y); otherwise it stays silent. With probability k_j the jammer draws
// x uniform on [0, power(2v)] and spends jam(x), which is zero whenever x is
// below the unjammed requirement power(0).
struct MixedFrameStrategy {
  double k_p = 1.0;
  double k_j = 1.0;
  double v = 0.0;
  MixedBranch branch = MixedBranch::BothAlwaysOn;
  double tx_budget = 0.0;
  double jam_budget = 0.0;
  double power_integral = 0.0;  // integral of power over [0, 2v]

  std::function<double(double)> power;  // required transmit power at a jam level
  std::function<double(double)> jam;    // inverse of power, zero below power(0)

  double top_power() const { return power(2.0 * v); }
  double tx_cdf(double p) const;
  double jam_cdf(double j) const;
  // Means implied by the mixture (should reproduce the budgets).
  double tx_mean() const;
  double jam_mean() const;
  double outage() const;

  template <class Engine>
  double draw_tx(Engine& rng) const {
    const double u = numerics::unit_uniform(rng);
    const double y = numerics::unit_uniform(rng);
    return u < k_p ? power(2.0 * v * y) : 0.0;
  }

  template <class Engine>
  double draw_jam(Engine& rng) const {
    const double u = numerics::unit_uniform(rng);
    const double x = top_power() * numerics::unit_uniform(rng);
    return u < k_j ? jam(x) : 0.0;
  }

  // A draw is in outage when the transmit power falls short of what the
  // jam draw requires.
  bool in_outage(double tx, double jam_power) const { return tx < power(jam_power); }
};

// Builds the mixture from a sampled required-power curve. The curve is
// copied into the returned strategy.
MixedFrameStrategy frame_mixed_equilibrium(const PJCurve& curve, double tx_budget,
                                           double jam_budget);

// Same construction on the affine single-block curve, evaluated exactly.
MixedFrameStrategy frame_mixed_m1(double h, double tx_budget, double jam_budget,
                                  const SystemParams& params);

// Closed-form single-block frame outage under the mixed equilibrium.
double frame_outage_m1(double h, double tx_budget, double jam_budget, const SystemParams& params);

// Outage where the two single-block branches meet.
double frame_outage_m1_boundary(double jam_budget, double noise_var);

// --- first level (single block) ---

enum class ProfileBranch { Off, TxGated, JamGated };

const char* to_string(ProfileBranch branch);

// Long-term allocation across channel gains for one-block frames. Frames at
// or below off_threshold get nothing from either side. Between the two
// thresholds the transmitter sometimes stays silent (TxGated); above
// case_threshold the jammer does (JamGated).
struct FirstLevelProfile {
  SystemParams params;
  double tx_multiplier = 0.0;
  double jam_multiplier = std::numeric_limits<double>::infinity();
  double off_threshold = 0.0;
  double case_threshold = 0.0;

  std::vector<double> h;
  std::vector<double> tx;
  std::vector<double> jam;
  std::vector<ProfileBranch> branch;

  explicit FirstLevelProfile(const SystemParams& p) : params(p) {}

  ProfileBranch branch_at(double gain) const;
  double tx_power(double gain) const;
  double jam_power(double gain) const;
  // Both branch formulas evaluated at an arbitrary gain (used for continuity).
  double tx_power_gated(double gain) const;
  double jam_power_gated(double gain) const;
  double tx_power_saturated(double gain) const;
  double jam_power_saturated(double gain) const;
};

inline constexpr int kProfileGridPoints = 2000;

FirstLevelProfile mixed_firstlevel_m1(const ChannelDistribution& dist, const SystemParams& params);

// Expected frame outage of a profile; frames with no power count as lost.
double overall_outage_mixed_m1(const FirstLevelProfile& profile, const ChannelDistribution& dist,
                               const SystemParams& params);

// Expected per-frame powers under a profile.
double profile_tx_mean(const FirstLevelProfile& profile, const ChannelDistribution& dist);
double profile_jam_mean(const FirstLevelProfile& profile, const ChannelDistribution& dist);

struct StationarityReport {
  double max_residual = 0.0;
  double worst_gain = 0.0;
  int checked = 0;
};

// Relative residuals of both players' stationarity conditions on the profile
// grid, skipping points within `margin` (relative) of a threshold. Silent
// frames are checked for the sign of the transmitter's slack.
StationarityReport stationarity_residuals(const FirstLevelProfile& profile,
                                          double margin = 1e-6);

// --- Bayes play inside a frame ---

struct BayesPlay {
  BlockAllocation tx;   // transmitter's side of the cross play
  BlockAllocation jam;  // jammer's side
  double mutual_info = 0.0;
  bool outage = false;
};

// Each side solves the frame game against the budget it infers from its own
// draw: the transmitter assumes jam(p), the jammer assumes power(j).
BayesPlay bayes_frame_play(const PJCurve& curve, double tx_draw, double jam_draw);

}  // namespace jamgame
