#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "jamgame/channel.hpp"
#include "jamgame/intraframe.hpp"

namespace jamgame {

// Required-power functions of every atom of a discrete state space, with
// the atom probabilities. Evaluations are exact solver calls (affine
// closed form when M = 1); each object memoizes nothing and is cheap to copy.
class FrameCurves {
 public:
  using PowerFn = std::function<double(Index atom, double jam)>;

  FrameCurves(const DiscretizedStateSpace& space, const SystemParams& params);
  // Arbitrary curves, e.g. hand-made toy vases. `jam_for_power` may be empty,
  // in which case inversion is done by bisection on `power_for_jam`.
  FrameCurves(Eigen::VectorXd probabilities, PowerFn power_for_jam, PowerFn jam_for_power = {});

  Index size() const { return probs_.size(); }
  double probability(Index atom) const { return probs_[atom]; }
  const Eigen::VectorXd& probabilities() const { return probs_; }

  // Transmit power needed for rate R against jamming `jam` (+inf if none suffices).
  double power(Index atom, double jam) const { return power_(atom, jam); }
  // Jamming needed to pin the rate to R against `power`; 0 if already short.
  double jam(Index atom, double power) const;

 private:
  Eigen::VectorXd probs_;
  PowerFn power_;
  PowerFn inverse_;
};

struct VaseOptions {
  double jam_quantum_fraction = 1e-3;  // expected jamming per greedy step / jam budget
  int k_points = 200;
  int refine_points = 40;
};

// Outcome of one pure (commit-first) solution over a discrete space.
struct PureSolution {
  double level = 0.0;    // winning K
  double outage = 0.0;
  Eigen::VectorXd tx_power;   // per atom, power of the served part
  Eigen::VectorXd jam_power;  // per atom
  Eigen::VectorXd served;     // fraction of each atom's frames the transmitter funds
  Eigen::VectorXd jammed;     // fraction of each atom's frames the jammer hits (minimax)
  std::vector<Index> tx_set;
  std::vector<Index> jam_set;
  double tx_spent = 0.0;
  double jam_spent = 0.0;
  Eigen::VectorXd k_grid;     // every K evaluated, ascending
  Eigen::VectorXd k_outage;
  Index winner = 0;           // index into k_grid
};

// Jammer-first solution (vase filling with a level cap K).
PureSolution maximin_solve(const FrameCurves& curves, const SystemParams& params,
                           const Eigen::VectorXd& k_grid, const VaseOptions& options = {});
// Transmitter-first solution (fund frames up to required jamming K).
PureSolution minimax_solve(const FrameCurves& curves, const SystemParams& params,
                           const Eigen::VectorXd& k_grid, const VaseOptions& options = {});

// Geometric K grids spanning the ranges where the outcome can still change.
Eigen::VectorXd maximin_k_grid(const FrameCurves& curves, const SystemParams& params,
                               const VaseOptions& options = {});
Eigen::VectorXd minimax_k_grid(const FrameCurves& curves, const SystemParams& params,
                               const VaseOptions& options = {});

// Grid solve followed by a finer pass between the winner's neighbours.
PureSolution maximin_search(const FrameCurves& curves, const SystemParams& params,
                            const VaseOptions& options = {});
PureSolution minimax_search(const FrameCurves& curves, const SystemParams& params,
                            const VaseOptions& options = {});

// M = 1 closed forms over a channel law.
struct MaximinClosedForm {
  double level = 0.0;
  double jam_low = 0.0;   // jammed frames are (jam_low, jam_high]
  double jam_high = 0.0;
  double served_from = 0.0;  // transmitter serves (served_from, inf)
  double outage = 0.0;
};

struct MinimaxClosedForm {
  double level = 0.0;
  double funded_from = 0.0;  // transmitter funds [funded_from, inf)
  double jam_to = 0.0;       // jammer kills [funded_from, jam_to]
  double outage = 0.0;
};

MaximinClosedForm maximin_m1(const ChannelDistribution& dist, const SystemParams& params);
MinimaxClosedForm minimax_m1(const ChannelDistribution& dist, const SystemParams& params);

// The same systems evaluated at a fixed K (exposed for sweeps and tests).
MaximinClosedForm maximin_m1_at(const ChannelDistribution& dist, const SystemParams& params,
                                double level);
MinimaxClosedForm minimax_m1_at(const ChannelDistribution& dist, const SystemParams& params,
                                double level);

}  // namespace jamgame
