#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "jamgame/channel.hpp"

namespace jamgame {

// Per-block powers of one frame, indexed in the channel's sorted order.
struct BlockAllocation {
  Eigen::VectorXd tx;
  Eigen::VectorXd jam;

  double tx_mean() const { return tx.size() ? tx.mean() : 0.0; }
  double jam_mean() const { return jam.size() ? jam.mean() : 0.0; }
};

// Water level and jammer multiplier of the within-frame solution, with the
// first active transmitter / jammer block (== M when nobody is active).
struct WaterfillParams {
  double water_level = 0.0;
  double jam_multiplier = 0.0;
  Index first_tx_block = 0;
  Index first_jam_block = 0;
};

// (1/M) sum log(1 + h P / (noise + J)) over expression-compatible vectors.
template <typename DH, typename DP, typename DJ>
typename DH::Scalar mutual_info(const Eigen::MatrixBase<DH>& h, const Eigen::MatrixBase<DP>& tx,
                                 const Eigen::MatrixBase<DJ>& jam, typename DH::Scalar noise_var) {
  using Scalar = typename DH::Scalar;
  const auto sinr = h.array() * tx.array() / (jam.array() + noise_var);
  return sinr.log1p().sum() / Scalar(h.size());
}

double mutual_info(const ChannelVector& h, const BlockAllocation& alloc, double noise_var);

struct FrameSolution {
  BlockAllocation alloc;
  WaterfillParams wf;
  double mutual_info = 0.0;
};

// Saddle point of the within-frame game with both frame budgets fixed.
FrameSolution nash_intraframe(const ChannelVector& h, double tx_mean, double jam_mean,
                              double noise_var);

// Minimum frame power P_M reaching I_M = R when the jammer spends J_M optimally.
// `power` is the frame average.
struct RequiredPower {
  double power = 0.0;
  BlockAllocation alloc;
  WaterfillParams wf;
};

RequiredPower required_tx_power(const ChannelVector& h, double jam_mean, const SystemParams& params);

// Minimum jamming J_M that pins I_M to R against transmitter power P_M;
// zero when P_M cannot reach R even unjammed.
RequiredPower required_jam_power(const ChannelVector& h, double tx_mean,
                                 const SystemParams& params);

enum class M2Case { BothOnStrongBlock, JammerOnStrongBlock, Split };

struct M2Split {
  double jam_weak = 0.0;    // block with the smaller gain
  double jam_strong = 0.0;
  M2Case branch = M2Case::Split;
  double ratio = 1.0;       // optimal (x0/h0)/(x1/h1)
};

// Optimal ratio of noise-plus-jamming per unit gain across two blocks.
double m2_optimal_ratio(double h_weak, double h_strong, double c);

// Frame power needed for rate R when the jam split realizes ratio r.
double m2_power_at_ratio(double r, double h_weak, double h_strong, double jam_mean,
                         double noise_var, double c);

M2Split m2_jammer_split(double h_weak, double h_strong, double jam_mean,
                        const SystemParams& params);

struct KktCheck {
  std::string name;
  bool passed = true;
  double residual = 0.0;
};

struct KktReport {
  std::vector<KktCheck> checks;
  bool passed() const;
  const KktCheck& operator[](const std::string& name) const;
};

// Checks the threshold brackets for the first active blocks, the rate
// identity (against params.rate()) and the bracket form of tx powers.
KktReport verify_kkt_structure(const BlockAllocation& alloc, const WaterfillParams& wf,
                               const ChannelVector& h, const SystemParams& params,
                               double tolerance = 1e-9);

// --- required-power curves ---

struct CurveSample {
  double jam = 0.0;
  double power = 0.0;
  Index first_tx_block = 0;
  Index first_jam_block = 0;
  double water_level = 0.0;
  double jam_multiplier = 0.0;
  bool refined = false;  // inserted by breakpoint refinement
};

// Geometric jam grid J_k = step * (growth^k - 1), k = 0..points-1.
struct CurveGrid {
  double step = 0.1;
  double growth = 1.15;
  int points = 60;
  bool refine = true;

  static CurveGrid defaults(const SystemParams& params);
};

// Sampled required-power function of one channel realization. Between
// samples it is treated as piecewise linear.
struct PJCurve {
  ChannelVector channel;
  SystemParams params;
  std::vector<CurveSample> samples;

  double max_jam() const { return samples.back().jam; }
  double power_at(double jam) const;
  // Inverse of power_at; zero below the unjammed requirement.
  double jam_at(double power) const;
  // Integral of power_at over [0, jam].
  double integral(double jam) const;
  bool is_affine() const;
};

PJCurve build_pj_curve(const ChannelVector& h, const CurveGrid& grid, const SystemParams& params);

// Curve sampled at explicit jam levels (first must be 0, strictly increasing).
PJCurve build_pj_curve(const ChannelVector& h, const std::vector<double>& jam_levels,
                       const SystemParams& params);

// Final slope of a curve: the multiplier solving sum log(1 + mu h_m) = M R.
double asymptotic_slope(const ChannelVector& h, const SystemParams& params);

}  // namespace jamgame
