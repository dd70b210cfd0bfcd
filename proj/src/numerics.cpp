#include "jamgame/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <vector>

namespace jamgame::numerics {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  return Rule::integrate(f, a, b, 12, rel_tol);
}

std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo,
                                         double hi, bool maximize, int iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto better = [maximize](double u, double v) { return maximize ? u > v : u < v; };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (better(f1, f2)) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return better(f1, f2) ? std::pair{x1, f1} : std::pair{x2, f2};
}

std::pair<double, double> scan_and_refine(const std::function<double(double)>& f, double lo,
                                          double hi, int points, bool maximize) {
  std::vector<double> xs(points), ys(points);
  const double ratio = std::pow(hi / lo, 1.0 / (points - 1));
  std::size_t best = 0;
  for (int i = 0; i < points; ++i) {
    xs[i] = i + 1 == points ? hi : lo * std::pow(ratio, i);
    ys[i] = f(xs[i]);
    if (maximize ? ys[i] > ys[best] : ys[i] < ys[best]) best = i;
  }
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[best + 1 == xs.size() ? best : best + 1];
  auto refined = golden_section(f, a, b, maximize);
  const bool keep_scan = maximize ? ys[best] >= refined.second : ys[best] <= refined.second;
  return keep_scan ? std::pair{xs[best], ys[best]} : refined;
}

}  // namespace jamgame::numerics
