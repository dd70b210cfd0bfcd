#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace jamgame {

using Eigen::Index;

// Rate, noise, frame length and the two long-term budgets. The derived
// constant c = exp(M R) is computed once at construction.
class SystemParams {
 public:
  SystemParams(double rate, double noise_var, int blocks, double tx_budget = 0.0,
               double jam_budget = 0.0);

  double rate() const { return rate_; }
  double noise_var() const { return noise_var_; }
  int blocks() const { return blocks_; }
  double tx_budget() const { return tx_budget_; }
  double jam_budget() const { return jam_budget_; }
  double c() const { return c_; }

  SystemParams with_budgets(double tx_budget, double jam_budget) const;
  SystemParams with_rate(double rate) const;
  SystemParams with_blocks(int blocks) const;

 private:
  double rate_;
  double noise_var_;
  int blocks_;
  double tx_budget_;
  double jam_budget_;
  double c_;
};

// Squared fading gains of one frame, sorted ascending (stable), with the
// permutation back to the original block order.
class ChannelVector {
 public:
  explicit ChannelVector(const Eigen::VectorXd& gains);
  ChannelVector(std::initializer_list<double> gains);

  const Eigen::VectorXd& values() const { return sorted_; }
  const std::vector<Index>& order() const { return order_; }
  Index size() const { return sorted_.size(); }
  double operator[](Index m) const { return sorted_[m]; }

  // Scatter a vector indexed in sorted order back to original block order.
  Eigen::VectorXd to_original(const Eigen::VectorXd& sorted) const;

 private:
  Eigen::VectorXd sorted_;
  std::vector<Index> order_;
};

// Per-block gain law: exponential with a rate, or a finite set of atoms.
class ChannelDistribution {
 public:
  static ChannelDistribution exponential(double rate);
  static ChannelDistribution discrete(const Eigen::VectorXd& values,
                                      const Eigen::VectorXd& probabilities);

  bool is_discrete() const { return discrete_; }
  double rate() const { return rate_; }
  const Eigen::VectorXd& atom_values() const { return values_; }
  const Eigen::VectorXd& atom_probabilities() const { return probs_; }

  double cdf(double h) const;
  double mean() const;
  // Probability of (a, b].
  double mass(double a, double b) const;
  // Integral of f over (a, b] against the law. Quadrature for the
  // exponential case, exact sums for atoms.
  double expect(const std::function<double(double)>& f, double a, double b) const;
  // Smallest h with cdf(h) >= u.
  double quantile(double u) const;

 private:
  bool discrete_ = false;
  double rate_ = 0.0;
  Eigen::VectorXd values_;  // sorted ascending
  Eigen::VectorXd probs_;
};

// Finite channel-state space: one ChannelVector per atom with its mass.
struct DiscretizedStateSpace {
  std::vector<ChannelVector> states;
  Eigen::VectorXd mass;
  double tail_mass = 0.0;  // mass of the per-block atom beyond h_max

  Index size() const { return mass.size(); }
};

inline constexpr Index kDefaultStateCap = 2'000'000;

ChannelVector sample_channel(const ChannelDistribution& dist, int blocks, std::uint64_t seed);

// Equal-width bins on [0, h_max] with atoms at the conditional means, plus a
// final atom at the conditional mean of the tail. `n_states` counts the tail
// atom. For blocks > 1 the M-fold product is returned.
DiscretizedStateSpace discretize_exponential(double rate, int n_states, double h_max,
                                             int blocks = 1, Index state_cap = kDefaultStateCap);

// One-dimensional space from an explicit atom list.
DiscretizedStateSpace discrete_space(const ChannelDistribution& dist, int blocks = 1,
                                     Index state_cap = kDefaultStateCap);

}  // namespace jamgame
