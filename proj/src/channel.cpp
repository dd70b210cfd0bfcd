#include "jamgame/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "jamgame/errors.hpp"
#include "jamgame/numerics.hpp"

namespace jamgame {

SystemParams::SystemParams(double rate, double noise_var, int blocks, double tx_budget,
                           double jam_budget)
    : rate_(rate),
      noise_var_(noise_var),
      blocks_(blocks),
      tx_budget_(tx_budget),
      jam_budget_(jam_budget) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ParameterError("rate must be positive");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var))
    throw ParameterError("noise variance must be positive");
  if (blocks < 1) throw ParameterError("blocks per frame must be at least 1");
  if (!(tx_budget >= 0.0) || !(jam_budget >= 0.0))
    throw ParameterError("power budgets must be non-negative");
  c_ = std::exp(blocks * rate);
}

SystemParams SystemParams::with_budgets(double tx_budget, double jam_budget) const {
  return {rate_, noise_var_, blocks_, tx_budget, jam_budget};
}
SystemParams SystemParams::with_rate(double rate) const {
  return {rate, noise_var_, blocks_, tx_budget_, jam_budget_};
}
SystemParams SystemParams::with_blocks(int blocks) const {
  return {rate_, noise_var_, blocks, tx_budget_, jam_budget_};
}

ChannelVector::ChannelVector(const Eigen::VectorXd& gains) : sorted_(gains.size()), order_(gains.size()) {
  if (gains.size() == 0) throw ParameterError("channel vector must have at least one block");
  for (Index m = 0; m < gains.size(); ++m)
    if (!std::isfinite(gains[m]) || gains[m] < 0.0)
      throw ParameterError("channel gains must be finite and non-negative");
  std::iota(order_.begin(), order_.end(), Index{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](Index a, Index b) { return gains[a] < gains[b]; });
  for (Index m = 0; m < gains.size(); ++m) sorted_[m] = gains[order_[m]];
}

ChannelVector::ChannelVector(std::initializer_list<double> gains)
    : ChannelVector(Eigen::Map<const Eigen::VectorXd>(gains.begin(), Index(gains.size()))) {}

Eigen::VectorXd ChannelVector::to_original(const Eigen::VectorXd& sorted) const {
  if (sorted.size() != size()) throw AlignmentError("vector length does not match channel");
  Eigen::VectorXd out(size());
  for (Index m = 0; m < size(); ++m) out[order_[m]] = sorted[m];
  return out;
}

ChannelDistribution ChannelDistribution::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw ParameterError("exponential rate must be positive and finite");
  ChannelDistribution d;
  d.rate_ = rate;
  return d;
}

ChannelDistribution ChannelDistribution::discrete(const Eigen::VectorXd& values,
                                                  const Eigen::VectorXd& probabilities) {
  if (values.size() == 0 || values.size() != probabilities.size())
    throw ParameterError("discrete distribution needs matching non-empty atom lists");
  if ((values.array() < 0.0).any() || !values.allFinite())
    throw ParameterError("atom values must be finite and non-negative");
  if ((probabilities.array() < 0.0).any())
    throw ParameterError("atom probabilities must be non-negative");
  if (std::abs(probabilities.sum() - 1.0) > 1e-12)
    throw ParameterError("atom probabilities must sum to 1");
  std::vector<Index> idx(values.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return values[a] < values[b]; });
  ChannelDistribution d;
  d.discrete_ = true;
  d.values_.resize(values.size());
  d.probs_.resize(values.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    d.values_[Index(k)] = values[idx[k]];
    d.probs_[Index(k)] = probabilities[idx[k]];
  }
  return d;
}

double ChannelDistribution::cdf(double h) const {
  if (!discrete_) return h <= 0.0 ? 0.0 : -std::expm1(-rate_ * h);
  double acc = 0.0;
  for (Index k = 0; k < values_.size() && values_[k] <= h; ++k) acc += probs_[k];
  return std::min(acc, 1.0);
}

double ChannelDistribution::mean() const {
  return discrete_ ? values_.dot(probs_) : 1.0 / rate_;
}

double ChannelDistribution::mass(double a, double b) const {
  if (!(b > a)) return 0.0;
  if (!discrete_) {
    a = std::max(a, 0.0);
    if (std::isinf(b)) return std::exp(-rate_ * a);
    return std::exp(-rate_ * a) * -std::expm1(-rate_ * (b - a));
  }
  double acc = 0.0;
  for (Index k = 0; k < values_.size(); ++k)
    if (values_[k] > a && values_[k] <= b) acc += probs_[k];
  return acc;
}

double ChannelDistribution::expect(const std::function<double(double)>& f, double a,
                                   double b) const {
  if (!(b > a)) return 0.0;
  if (discrete_) {
    double acc = 0.0;
    for (Index k = 0; k < values_.size(); ++k)
      if (values_[k] > a && values_[k] <= b && probs_[k] > 0.0) acc += probs_[k] * f(values_[k]);
    return acc;
  }
  a = std::max(a, 0.0);
  const double lam = rate_;
  return numerics::integrate([&](double h) { return f(h) * lam * std::exp(-lam * h); }, a, b);
}

double ChannelDistribution::quantile(double u) const {
  if (!discrete_) return u >= 1.0 ? std::numeric_limits<double>::infinity() : -std::log1p(-u) / rate_;
  double acc = 0.0;
  for (Index k = 0; k < values_.size(); ++k) {
    acc += probs_[k];
    if (acc >= u) return values_[k];
  }
  return values_[values_.size() - 1];
}

ChannelVector sample_channel(const ChannelDistribution& dist, int blocks, std::uint64_t seed) {
  if (blocks < 1) throw ParameterError("blocks per frame must be at least 1");
  std::mt19937_64 rng(seed);
  Eigen::VectorXd h(blocks);
  for (int m = 0; m < blocks; ++m) {
    const double u = numerics::unit_uniform(rng);
    h[m] = dist.is_discrete() ? dist.quantile(u) : -std::log1p(-u) / dist.rate();
  }
  return ChannelVector(h);
}

namespace {

DiscretizedStateSpace product_space(const Eigen::VectorXd& values, const Eigen::VectorXd& probs,
                                    int blocks, Index state_cap) {
  if (blocks < 1) throw ParameterError("blocks per frame must be at least 1");
  const Index n = values.size();
  double total = 1.0;
  for (int m = 0; m < blocks; ++m) total *= double(n);
  if (total > double(state_cap))
    throw CapacityError("state space of " + std::to_string(total) + " atoms exceeds cap " +
                        std::to_string(state_cap));
  const Index count = Index(total);
  DiscretizedStateSpace space;
  space.states.reserve(count);
  space.mass.resize(count);
  std::vector<Index> digits(blocks, 0);
  Eigen::VectorXd h(blocks);
  for (Index s = 0; s < count; ++s) {
    double w = 1.0;
    for (int m = 0; m < blocks; ++m) {
      h[m] = values[digits[m]];
      w *= probs[digits[m]];
    }
    space.states.emplace_back(h);
    space.mass[s] = w;
    for (int m = blocks - 1; m >= 0; --m) {
      if (++digits[m] < n) break;
      digits[m] = 0;
    }
  }
  return space;
}

}  // namespace

DiscretizedStateSpace discretize_exponential(double rate, int n_states, double h_max, int blocks,
                                             Index state_cap) {
  if (!(rate > 0.0)) throw ParameterError("exponential rate must be positive");
  if (n_states < 2) throw ParameterError("need at least two states");
  if (!(h_max > 0.0) || !std::isfinite(h_max)) throw ParameterError("h_max must be finite and positive");
  const int bins = n_states - 1;
  const double width = h_max / bins;
  const double inv = 1.0 / rate;
  Eigen::VectorXd values(n_states), probs(n_states);
  for (int b = 0; b < bins; ++b) {
    const double lo = b * width;
    const double hi = b + 1 == bins ? h_max : (b + 1) * width;
    const double head = std::exp(-rate * lo);
    const double m = head * -std::expm1(-rate * (hi - lo));
    // integral of h f(h) over the bin
    const double first = (lo + inv) * head - (hi + inv) * std::exp(-rate * hi);
    probs[b] = m;
    values[b] = m > 0.0 ? first / m : 0.5 * (lo + hi);
  }
  probs[bins] = std::exp(-rate * h_max);
  values[bins] = h_max + inv;
  DiscretizedStateSpace space = product_space(values, probs, blocks, state_cap);
  space.tail_mass = probs[bins];
  return space;
}

DiscretizedStateSpace discrete_space(const ChannelDistribution& dist, int blocks, Index state_cap) {
  if (!dist.is_discrete()) throw ParameterError("discrete_space needs an atom distribution");
  return product_space(dist.atom_values(), dist.atom_probabilities(), blocks, state_cap);
}

}  // namespace jamgame
