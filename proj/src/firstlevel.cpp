#include <algorithm>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "jamgame/errors.hpp"
#include "jamgame/mixed.hpp"

namespace jamgame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integrals of 1/h, 1 and h over (lo, hi] against the channel law.
struct Moments {
  double inv = 0.0;
  double zero = 0.0;
  double one = 0.0;
};

double e1(double x) {
  if (x == kInf) return 0.0;
  if (x <= 0.0) return kInf;
  return boost::math::expint(1, x);
}

Moments moments(const ChannelDistribution& dist, double lo, double hi) {
  Moments m;
  if (!(hi > lo)) return m;
  if (dist.is_discrete()) {
    const auto& values = dist.atom_values();
    const auto& probs = dist.atom_probabilities();
    for (Index k = 0; k < values.size(); ++k) {
      const double h = values[k];
      if (h <= lo || h > hi) continue;
      m.inv += probs[k] / h;
      m.zero += probs[k];
      m.one += probs[k] * h;
    }
    return m;
  }
  const double r = dist.rate();
  const double tail_lo = std::exp(-r * lo);
  const double tail_hi = hi == kInf ? 0.0 : std::exp(-r * hi);
  m.zero = tail_lo - tail_hi;
  m.one = (lo + 1.0 / r) * tail_lo - (hi == kInf ? 0.0 : (hi + 1.0 / r) * tail_hi);
  m.inv = r * (e1(r * lo) - e1(r * hi));
  return m;
}

// The profile as a function of (tx multiplier, 1 / jam multiplier).
struct Multipliers {
  double lambda;
  double inv_mu;  // zero when the jammer has no budget
  double slope;   // c - 1
  double noise;

  double off_threshold() const { return lambda * slope * noise; }
  double case_threshold() const { return lambda * slope * (inv_mu + noise); }

  double tx_mean(const ChannelDistribution& dist) const {
    const double h01 = off_threshold(), h12 = case_threshold();
    double total = slope * (noise + 0.5 * inv_mu) * moments(dist, h12, kInf).inv;
    if (h12 > h01) {
      const Moments g = moments(dist, h01, h12);
      total += 0.5 / inv_mu *
               (g.one / (slope * lambda * lambda) - slope * noise * noise * g.inv);
    }
    return total;
  }

  double jam_mean(const ChannelDistribution& dist) const {
    const double h01 = off_threshold(), h12 = case_threshold();
    double total = 0.5 * slope * lambda * inv_mu * inv_mu * moments(dist, h12, kInf).inv;
    if (h12 > h01) {
      const Moments g = moments(dist, h01, h12);
      total += g.one / (2.0 * lambda * slope) - noise * g.zero +
               0.5 * noise * noise * lambda * slope * g.inv;
    }
    return total;
  }
};

// Tx multiplier meeting the transmit budget for a fixed jam multiplier, or
// NaN when the budget exceeds what any positive multiplier absorbs.
double tx_multiplier_for(const ChannelDistribution& dist, double inv_mu, double slope,
                         double noise, double budget) {
  auto spent = [&](double log_lambda) {
    return Multipliers{std::exp(log_lambda), inv_mu, slope, noise}.tx_mean(dist);
  };
  double lo = -std::log(slope * noise * dist.mean());
  double hi = lo;
  for (int i = 0; spent(hi) > budget; ++i, hi += 1.0)
    if (i > 2000) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; spent(lo) <= budget; ++i, lo -= 1.0)
    if (i > 2000) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(numerics::bisect_first_true([&](double t) { return spent(t) <= budget; }, lo, hi));
}

double gain_ratio(const FirstLevelProfile& p, double gain) {
  return gain / (p.tx_multiplier * (p.params.c() - 1.0));
}

double inv_mu_of(const FirstLevelProfile& p) {
  return std::isfinite(p.jam_multiplier) ? 1.0 / p.jam_multiplier : 0.0;
}

void fill_grid(FirstLevelProfile& p) {
  const double lo = p.off_threshold / 10.0;
  const double hi = 10.0 * std::max(p.case_threshold, p.off_threshold);
  const int n = kProfileGridPoints;
  std::vector<double> grid;
  grid.reserve(n + 2);
  for (int i = 1; i <= n; ++i) grid.push_back(lo * std::pow(hi / lo, double(i) / n));
  grid.push_back(p.off_threshold);
  grid.push_back(p.case_threshold);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double g : grid) {
    p.h.push_back(g);
    p.tx.push_back(p.tx_power(g));
    p.jam.push_back(p.jam_power(g));
    p.branch.push_back(p.branch_at(g));
  }
}

double relative_gap(double value, double target) {
  return std::abs(value - target) / std::max(std::abs(target), 1e-300);
}

}  // namespace

const char* to_string(ProfileBranch branch) {
  switch (branch) {
    case ProfileBranch::Off: return "off";
    case ProfileBranch::TxGated: return "tx_gated";
    case ProfileBranch::JamGated: return "jam_gated";
  }
  return "?";
}

ProfileBranch FirstLevelProfile::branch_at(double gain) const {
  if (gain <= off_threshold) return ProfileBranch::Off;
  if (gain <= case_threshold) return ProfileBranch::TxGated;
  return ProfileBranch::JamGated;
}

double FirstLevelProfile::tx_power_gated(double gain) const {
  const double s = gain_ratio(*this, gain);
  const double noise = params.noise_var();
  return (params.c() - 1.0) / (2.0 * gain) * jam_multiplier * (s - noise) * (s + noise);
}

double FirstLevelProfile::jam_power_gated(double gain) const {
  const double s = gain_ratio(*this, gain);
  const double d = s - params.noise_var();
  return d * d / (2.0 * s);
}

double FirstLevelProfile::tx_power_saturated(double gain) const {
  return (params.c() - 1.0) / gain * (params.noise_var() + 0.5 * inv_mu_of(*this));
}

double FirstLevelProfile::jam_power_saturated(double gain) const {
  const double inv_mu = inv_mu_of(*this);
  return (params.c() - 1.0) / gain * 0.5 * tx_multiplier * inv_mu * inv_mu;
}

double FirstLevelProfile::tx_power(double gain) const {
  switch (branch_at(gain)) {
    case ProfileBranch::Off: return 0.0;
    case ProfileBranch::TxGated: return tx_power_gated(gain);
    case ProfileBranch::JamGated: return tx_power_saturated(gain);
  }
  return 0.0;
}

double FirstLevelProfile::jam_power(double gain) const {
  switch (branch_at(gain)) {
    case ProfileBranch::Off: return 0.0;
    case ProfileBranch::TxGated: return jam_power_gated(gain);
    case ProfileBranch::JamGated: return jam_power_saturated(gain);
  }
  return 0.0;
}

FirstLevelProfile mixed_firstlevel_m1(const ChannelDistribution& dist, const SystemParams& params) {
  if (params.blocks() != 1) throw ParameterError("first-level closed form needs M = 1");
  const double tx_budget = params.tx_budget();
  const double jam_budget = params.jam_budget();
  if (!(tx_budget > 0.0))
    throw InfeasibleError("transmit budget must be positive for the mixed first level");
  const double slope = params.c() - 1.0;
  const double noise = params.noise_var();

  FirstLevelProfile out(params);
  if (jam_budget == 0.0) {
    out.tx_multiplier = tx_multiplier_for(dist, 0.0, slope, noise, tx_budget);
    if (!std::isfinite(out.tx_multiplier))
      throw InfeasibleError("transmit budget exceeds what the channel law can absorb");
    out.jam_multiplier = kInf;
  } else {
    // Outer search on log(mu): jam spending falls as mu grows.
    auto jam_spent = [&](double log_mu) {
      const double inv_mu = std::exp(-log_mu);
      const double lambda = tx_multiplier_for(dist, inv_mu, slope, noise, tx_budget);
      if (!std::isfinite(lambda)) return std::numeric_limits<double>::quiet_NaN();
      return Multipliers{lambda, inv_mu, slope, noise}.jam_mean(dist);
    };
    auto settled = [&](double t) { return jam_spent(t) <= jam_budget; };
    double lo = -std::log(noise);
    double hi = lo;
    for (int i = 0; !settled(hi); ++i, hi += 1.0)
      if (i > 2000) throw InfeasibleError("jam budget cannot be matched by any multiplier");
    for (int i = 0; settled(lo) && i <= 2000; ++i) lo -= 1.0;
    if (settled(lo) || std::isnan(jam_spent(lo)))
      throw InfeasibleError("jam budget " + std::to_string(jam_budget) +
                            " unreachable for transmit budget " + std::to_string(tx_budget));
    const double log_mu = numerics::bisect_first_true(settled, lo, hi);
    out.jam_multiplier = std::exp(log_mu);
    out.tx_multiplier = tx_multiplier_for(dist, std::exp(-log_mu), slope, noise, tx_budget);
  }
  const Multipliers m{out.tx_multiplier, inv_mu_of(out), slope, noise};
  out.off_threshold = m.off_threshold();
  out.case_threshold = m.case_threshold();
  fill_grid(out);
  return out;
}

double profile_tx_mean(const FirstLevelProfile& profile, const ChannelDistribution& dist) {
  auto f = [&](double g) { return profile.tx_power(g); };
  return dist.expect(f, profile.off_threshold, profile.case_threshold) +
         dist.expect(f, profile.case_threshold, kInf);
}

double profile_jam_mean(const FirstLevelProfile& profile, const ChannelDistribution& dist) {
  auto f = [&](double g) { return profile.jam_power(g); };
  return dist.expect(f, profile.off_threshold, profile.case_threshold) +
         dist.expect(f, profile.case_threshold, kInf);
}

double overall_outage_mixed_m1(const FirstLevelProfile& profile, const ChannelDistribution& dist,
                               const SystemParams& params) {
  auto frame = [&](double g) {
    return frame_outage_m1(g, profile.tx_power(g), profile.jam_power(g), params);
  };
  const double silent = dist.cdf(profile.off_threshold);
  return silent + dist.expect(frame, profile.off_threshold, profile.case_threshold) +
         dist.expect(frame, profile.case_threshold, kInf);
}

StationarityReport stationarity_residuals(const FirstLevelProfile& profile, double margin) {
  StationarityReport report;
  const double slope = profile.params.c() - 1.0;
  const double noise = profile.params.noise_var();
  const double lambda = profile.tx_multiplier;
  const double mu = profile.jam_multiplier;
  if (!std::isfinite(mu)) return report;  // no jammer: the transmitter sits on a kink

  auto near = [&](double g, double t) { return std::abs(g - t) <= margin * t; };
  for (std::size_t i = 0; i < profile.h.size(); ++i) {
    const double g = profile.h[i];
    if (near(g, profile.off_threshold) || near(g, profile.case_threshold)) continue;
    const double p = profile.tx[i];
    const double j = profile.jam[i];
    const double gain = g / slope;
    double residual = 0.0;
    switch (profile.branch[i]) {
      case ProfileBranch::Off:
        residual = std::max(0.0, gain / noise - lambda) / lambda;
        break;
      case ProfileBranch::TxGated: {
        const double root = std::sqrt(1.0 + 2.0 * noise / j);
        const double denom = j * (1.0 + root) + noise;
        const double tx_side = relative_gap(gain / denom, lambda);
        const double jam_side = relative_gap(gain / denom * p / (j * root), mu);
        residual = std::max(tx_side, jam_side);
        break;
      }
      case ProfileBranch::JamGated: {
        const double excess = gain * p - noise;
        const double tx_side = relative_gap(gain * j / (2.0 * excess * excess), lambda);
        const double jam_side = relative_gap(1.0 / (2.0 * excess), mu);
        residual = std::max(tx_side, jam_side);
        break;
      }
    }
    ++report.checked;
    if (residual > report.max_residual) {
      report.max_residual = residual;
      report.worst_gain = g;
    }
  }
  return report;
}

}  // namespace jamgame
