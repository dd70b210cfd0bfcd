#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

namespace jamgame::numerics {

inline constexpr int kMaxBisections = 200;

// Smallest x in [lo, hi] with pred(x) true, assuming pred is monotone
// (false ... false true ... true) and pred(hi) holds. Runs until the bracket
// stops shrinking in floating point or the iteration cap is reached.
template <class Pred>
double bisect_first_true(Pred&& pred, double lo, double hi, int max_iter = kMaxBisections) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Doubles `start` until pred holds. Returns +inf if it never does.
template <class Pred>
double grow_until(Pred&& pred, double start, int max_doublings = 1000) {
  double x = start;
  for (int i = 0; i < max_doublings && std::isfinite(x); ++i, x *= 2.0)
    if (pred(x)) return x;
  return std::numeric_limits<double>::infinity();
}

// Adaptive Gauss-Kronrod on [a, b]; b may be +inf.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

// Golden-section refinement of a scalar search on [lo, hi].
// Returns (argbest, best value); `maximize` picks the direction.
std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo,
                                         double hi, bool maximize, int iterations = 60);

// Scan f on `points` geometric samples of [lo, hi], then golden-refine
// inside the bracket around the best sample. f need not be unimodal.
std::pair<double, double> scan_and_refine(const std::function<double(double)>& f, double lo,
                                          double hi, int points, bool maximize);

// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine draw.
template <class Engine>
double unit_uniform(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace jamgame::numerics
