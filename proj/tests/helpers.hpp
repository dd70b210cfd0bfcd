#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "jamgame/numerics.hpp"

namespace testing {

// Seeded stream for randomized instances; every test owns its own.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * jamgame::numerics::unit_uniform(rng_);
  }
  double exponential(double rate) {
    return -std::log1p(-jamgame::numerics::unit_uniform(rng_)) / rate;
  }
  Eigen::VectorXd exponential_gains(int blocks, double rate) {
    Eigen::VectorXd h(blocks);
    for (int m = 0; m < blocks; ++m) h[m] = exponential(rate);
    return h;
  }
  Eigen::VectorXd uniform_gains(int blocks, double lo, double hi) {
    Eigen::VectorXd h(blocks);
    for (int m = 0; m < blocks; ++m) h[m] = uniform(lo, hi);
    return h;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing
