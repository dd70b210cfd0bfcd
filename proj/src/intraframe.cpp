#include "jamgame/intraframe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jamgame/errors.hpp"
#include "jamgame/numerics.hpp"

namespace jamgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The sorted gains of one frame restricted to the blocks with h > 0, which
// are the only ones either player ever uses.
struct Frame {
  const Eigen::VectorXd& h;
  Index first;  // first positive block
  Index blocks;
  double noise;

  Frame(const ChannelVector& ch, double noise_var)
      : h(ch.values()), first(0), blocks(ch.size()), noise(noise_var) {
    while (first < blocks && h[first] <= 0.0) ++first;
  }

  bool dead() const { return first == blocks; }

  // Effective gain seen by the jammer's water level.
  double jam_gain(Index m, double mult) const {
    return std::isinf(mult) ? 0.0 : h[m] / (1.0 + mult * h[m]);
  }

  double jam_total(double level, double mult) const {
    double s = 0.0;
    for (Index m = first; m < blocks; ++m) s += std::max(0.0, level * jam_gain(m, mult) - noise);
    return s;
  }

  double tx_total(double level, double mult) const {
    double s = 0.0;
    for (Index m = first; m < blocks; ++m) {
      const double x = std::max(noise, level * jam_gain(m, mult));
      s += std::max(0.0, level - x / h[m]);
    }
    return s;
  }

  // M * I_M as a function of the two parameters. Each active block
  // contributes min(log(level h / noise), log(1 + mult h)).
  double rate_sum(double level, double mult) const {
    double s = 0.0;
    for (Index m = first; m < blocks; ++m) {
      const double unjammed = std::log(level * h[m] / noise);
      const double jammed = std::isinf(mult) ? kInf : std::log1p(mult * h[m]);
      s += std::max(0.0, std::min(unjammed, jammed));
    }
    return s;
  }

  // Water level that spends `total` jamming power at multiplier `mult`.
  // The jammed set is a suffix; scan suffixes from the top.
  double level_for_jam(double total, double mult) const {
    double gain_sum = 0.0;
    for (Index s = blocks - 1; s >= first; --s) {
      gain_sum += jam_gain(s, mult);
      const double level = (total + double(blocks - s) * noise) / gain_sum;
      if (s == first || level * jam_gain(s - 1, mult) <= noise) return level;
    }
    return kInf;
  }

  // Unjammed water level reaching M*R nats.
  double level_for_rate(double nats) const {
    double log_sum = 0.0;
    for (Index s = blocks - 1; s >= first; --s) {
      log_sum += std::log(h[s] / noise);
      const double level = std::exp((nats - log_sum) / double(blocks - s));
      if (s == first || level * h[s - 1] <= noise) return level;
    }
    return kInf;
  }

  // Unjammed water level spending `total` transmit power.
  double level_for_power(double total) const {
    double inv_sum = 0.0;
    for (Index s = blocks - 1; s >= first; --s) {
      inv_sum += noise / h[s];
      const double level = (total + inv_sum) / double(blocks - s);
      if (s == first || level * h[s - 1] <= noise) return level;
    }
    return kInf;
  }

  // Multiplier at which the strongest block starts to attract jamming.
  double onset_multiplier(double level) const {
    return std::max(0.0, level / noise - 1.0 / h[blocks - 1]);
  }

  BlockAllocation allocation(double level, double mult) const {
    BlockAllocation a{Eigen::VectorXd::Zero(blocks), Eigen::VectorXd::Zero(blocks)};
    for (Index m = first; m < blocks; ++m) {
      const double x = std::max(noise, level * jam_gain(m, mult));
      a.jam[m] = x - noise;
      a.tx[m] = std::max(0.0, level - x / h[m]);
    }
    return a;
  }

  WaterfillParams params(const BlockAllocation& a, double level, double mult) const {
    WaterfillParams wf{level, mult, blocks, blocks};
    for (Index m = blocks - 1; m >= 0; --m) {
      if (a.tx[m] > 0.0) wf.first_tx_block = m;
      if (a.jam[m] > 0.0) wf.first_jam_block = m;
    }
    return wf;
  }

  // Smallest multiplier whose rate at `level` reaches `nats`.
  double multiplier_for_rate(double level, double nats) const {
    auto reaches = [&](double mult) { return rate_sum(level, mult) >= nats; };
    const double hi = numerics::grow_until(reaches, 1e-6 / h[blocks - 1]);
    if (std::isinf(hi)) return kInf;
    return numerics::bisect_first_true(reaches, 0.0, hi);
  }
};

// `reported` differs from `mult` only for unjammed solutions, which are
// allocated with an infinite multiplier but report the jamming onset value.
RequiredPower package(const Frame& f, double level, double mult, double reported) {
  RequiredPower out;
  out.alloc = f.allocation(level, mult);
  out.wf = f.params(out.alloc, level, reported);
  out.power = out.alloc.tx_mean();
  return out;
}

void check_budget(double value, const char* what) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw ParameterError(std::string(what) + " must be finite and non-negative");
}

}  // namespace

double mutual_info(const ChannelVector& h, const BlockAllocation& alloc, double noise_var) {
  if (alloc.tx.size() != h.size() || alloc.jam.size() != h.size())
    throw AlignmentError("allocation length does not match channel length");
  return mutual_info(h.values(), alloc.tx, alloc.jam, noise_var);
}

FrameSolution nash_intraframe(const ChannelVector& h, double tx_mean, double jam_mean,
                              double noise_var) {
  check_budget(tx_mean, "transmit budget");
  check_budget(jam_mean, "jamming budget");
  const Frame f(h, noise_var);
  FrameSolution out;
  if (f.dead()) {
    if (jam_mean > 0.0)
      throw DegenerateChannelError("jamming a frame with all-zero gains");
    out.alloc = {Eigen::VectorXd::Zero(h.size()), Eigen::VectorXd::Zero(h.size())};
    out.wf = {0.0, 0.0, h.size(), h.size()};
    return out;
  }
  const double tx_total = tx_mean * double(f.blocks);
  const double jam_total = jam_mean * double(f.blocks);
  double level = 0.0, mult = 0.0, reported = 0.0;
  if (jam_total == 0.0) {
    level = tx_total > 0.0 ? f.level_for_power(tx_total) : noise_var / h[f.blocks - 1];
    mult = kInf;
    reported = tx_total > 0.0 ? f.onset_multiplier(level) : 0.0;
  } else if (tx_total == 0.0) {
    level = f.level_for_jam(jam_total, 0.0);
  } else {
    auto spends = [&](double m) { return f.tx_total(f.level_for_jam(jam_total, m), m) >= tx_total; };
    const double hi = numerics::grow_until(spends, 1e-6 / h[f.blocks - 1]);
    mult = numerics::bisect_first_true(spends, 0.0, hi);
    level = f.level_for_jam(jam_total, mult);
  }
  if (jam_total > 0.0) reported = mult;
  out.alloc = f.allocation(level, mult);
  out.wf = f.params(out.alloc, level, reported);
  out.mutual_info = mutual_info(h, out.alloc, noise_var);
  return out;
}

RequiredPower required_tx_power(const ChannelVector& h, double jam_mean,
                                const SystemParams& params) {
  check_budget(jam_mean, "jamming power");
  if (h.size() != params.blocks()) throw AlignmentError("channel length differs from M");
  const Frame f(h, params.noise_var());
  if (f.dead()) throw InfeasibleError("all channel gains are zero: required power is infinite");
  const double nats = params.rate() * double(f.blocks);
  if (jam_mean == 0.0) {
    const double level = f.level_for_rate(nats);
    return package(f, level, kInf, f.onset_multiplier(level));
  }
  const double jam_total = jam_mean * double(f.blocks);
  auto reaches = [&](double m) { return f.rate_sum(f.level_for_jam(jam_total, m), m) >= nats; };
  const double hi = numerics::grow_until(reaches, 1e-6 / h[f.blocks - 1]);
  const double mult = numerics::bisect_first_true(reaches, 0.0, hi);
  return package(f, f.level_for_jam(jam_total, mult), mult, mult);
}

RequiredPower required_jam_power(const ChannelVector& h, double tx_mean,
                                 const SystemParams& params) {
  check_budget(tx_mean, "transmit power");
  if (h.size() != params.blocks()) throw AlignmentError("channel length differs from M");
  const Frame f(h, params.noise_var());
  const double nats = params.rate() * double(f.blocks);
  const double tx_total = tx_mean * double(f.blocks);
  if (f.dead()) {
    RequiredPower out;
    out.alloc = {Eigen::VectorXd::Zero(h.size()), Eigen::VectorXd::Zero(h.size())};
    out.wf = {0.0, 0.0, h.size(), h.size()};
    return out;
  }
  const double unjammed_level = f.level_for_rate(nats);
  if (tx_total <= f.tx_total(unjammed_level, kInf)) {
    // Already at or below the rate without any jamming.
    const FrameSolution wf = nash_intraframe(h, tx_mean, 0.0, params.noise_var());
    return {0.0, wf.alloc, wf.wf};
  }
  // Along the solution path the water level grows with the jamming power;
  // for each level the multiplier is pinned by the rate equation.
  auto spends = [&](double level) {
    return f.tx_total(level, f.multiplier_for_rate(level, nats)) >= tx_total;
  };
  const double hi = numerics::grow_until(spends, 2.0 * unjammed_level);
  const double level = numerics::bisect_first_true(spends, unjammed_level, hi);
  const double mult = f.multiplier_for_rate(level, nats);
  RequiredPower out = package(f, level, mult, mult);
  out.power = out.alloc.jam_mean();
  return out;
}

double m2_optimal_ratio(double h_weak, double h_strong, double c) {
  if (!(h_strong > 0.0) || h_weak < 0.0 || h_weak > h_strong)
    throw ParameterError("need 0 <= h_weak <= h_strong with h_strong > 0");
  // Rationalized form of ((sqrt(d^2 + 4 h0 h1 c) - d) / (2 h0 sqrt c))^2,
  // finite at h_weak = 0 where it tends to c.
  const double d = h_strong - h_weak;
  const double root = std::sqrt(d * d + 4.0 * h_weak * h_strong * c);
  const double r = 2.0 * h_strong * std::sqrt(c) / (root + d);
  return r * r;
}

double m2_power_at_ratio(double r, double h_weak, double h_strong, double jam_mean,
                         double noise_var, double c) {
  return (jam_mean + noise_var) * (2.0 * std::sqrt(c * r) - r - 1.0) / (h_weak * r + h_strong);
}

M2Split m2_jammer_split(double h_weak, double h_strong, double jam_mean,
                        const SystemParams& params) {
  if (params.blocks() != 2) throw ParameterError("m2_jammer_split needs M = 2");
  check_budget(jam_mean, "jamming power");
  const double c = params.c();
  const double noise = params.noise_var();
  M2Split out;
  out.ratio = m2_optimal_ratio(h_weak, h_strong, c);
  const double all_on_strong = (2.0 * jam_mean + noise) / h_strong;
  if (h_weak == 0.0 || c * all_on_strong <= noise / h_weak) {
    out.branch = M2Case::BothOnStrongBlock;
    out.jam_strong = 2.0 * jam_mean;
  } else if (out.ratio * all_on_strong <= noise / h_weak) {
    out.branch = M2Case::JammerOnStrongBlock;
    out.jam_strong = 2.0 * jam_mean;
  } else {
    out.branch = M2Case::Split;
    const double x_total = 2.0 * (jam_mean + noise);
    const double x_strong = x_total * h_strong / (h_strong + out.ratio * h_weak);
    out.jam_strong = x_strong - noise;
    out.jam_weak = x_total - x_strong - noise;
  }
  return out;
}

bool KktReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const KktCheck& c) { return c.passed; });
}

const KktCheck& KktReport::operator[](const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no KKT check named " + name);
}

KktReport verify_kkt_structure(const BlockAllocation& alloc, const WaterfillParams& wf,
                               const ChannelVector& h, const SystemParams& params,
                               double tolerance) {
  const Index M = h.size();
  if (alloc.tx.size() != M || alloc.jam.size() != M)
    throw AlignmentError("allocation length does not match channel length");
  const double noise = params.noise_var();
  const double level = wf.water_level;
  const double mult = wf.jam_multiplier;
  Index p = M, j = M;
  for (Index m = M - 1; m >= 0; --m) {
    if (alloc.tx[m] > 0.0) p = m;
    if (alloc.jam[m] > 0.0) j = m;
  }
  KktReport report;
  auto add = [&](const char* name, double residual) {
    report.checks.push_back({name, residual <= tolerance, residual});
  };
  add("ordering", (p <= j && wf.first_tx_block == p && wf.first_jam_block == j) ? 0.0 : 1.0);

  // Thresholds: sigma^2/h_p <= level < sigma^2/h_{p-1}, and the jammer analogue
  // with sigma^2 (1 + mult h) / h.
  auto above = [&](double bound) { return std::max(0.0, bound - level) / std::max(level, bound); };
  auto below = [&](double bound) { return std::max(0.0, level - bound) / std::max(level, bound); };
  auto tx_edge = [&](Index m) { return noise / h[m]; };
  auto jam_edge = [&](Index m) { return noise * (1.0 + mult * h[m]) / h[m]; };
  double r = 0.0;
  if (p < M) r = std::max(r, above(tx_edge(p)));
  if (p > 0 && p <= M && h[p - 1] > 0.0) r = std::max(r, below(tx_edge(p - 1)));
  add("tx_threshold", r);
  r = 0.0;
  if (j < M) r = std::max(r, above(jam_edge(j)));
  if (j > 0 && h[j - 1] > 0.0 && std::isfinite(mult)) r = std::max(r, below(jam_edge(j - 1)));
  add("jam_threshold", r);

  // Rate identity: M R = sum_{p<=m<j} log(level h/sigma^2) + sum_{m>=j} log(1 + mult h),
  // and the allocation itself must deliver R.
  double nats = 0.0;
  for (Index m = p; m < M; ++m) {
    if (h[m] <= 0.0) continue;
    nats += m < j ? std::log(level * h[m] / noise) : std::log1p(mult * h[m]);
  }
  const double target = params.rate();
  const double achieved = mutual_info(h, alloc, noise);
  add("rate_identity",
      std::max(std::abs(nats / double(M) - target), std::abs(achieved - target)) / target);

  double bracket = 0.0, jam_form = 0.0;
  for (Index m = 0; m < M; ++m) {
    if (h[m] <= 0.0) {
      bracket = std::max(bracket, alloc.tx[m] > 0.0 ? 1.0 : 0.0);
      jam_form = std::max(jam_form, alloc.jam[m] > 0.0 ? 1.0 : 0.0);
      continue;
    }
    const double x = alloc.jam[m] + noise;
    const double expected_tx = std::max(0.0, level - x / h[m]);
    bracket = std::max(bracket, std::abs(alloc.tx[m] - expected_tx) / std::max(level, 1e-300));
    if (std::isfinite(mult)) {
      const double expected_jam = std::max(0.0, level * h[m] / (1.0 + mult * h[m]) - noise);
      jam_form = std::max(jam_form, std::abs(alloc.jam[m] - expected_jam) / noise);
    }
  }
  add("bracket_form", bracket);
  add("jam_form", jam_form);
  return report;
}

double asymptotic_slope(const ChannelVector& h, const SystemParams& params) {
  const Frame f(h, params.noise_var());
  if (f.dead()) throw InfeasibleError("all channel gains are zero");
  const double nats = params.rate() * double(f.blocks);
  auto reaches = [&](double mult) {
    double s = 0.0;
    for (Index m = f.first; m < f.blocks; ++m) s += std::log1p(mult * h[m]);
    return s >= nats;
  };
  const double hi = numerics::grow_until(reaches, 1e-6 / h[f.blocks - 1]);
  return numerics::bisect_first_true(reaches, 0.0, hi);
}

}  // namespace jamgame
