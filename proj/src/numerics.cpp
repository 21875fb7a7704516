#include "pbif/numerics.hpp"

#include <cmath>
#include <string>

#include "pbif/errors.hpp"

namespace pbif {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& fn, double a,
                     double fa, double b, double fb, double fm, double whole,
                     double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  if (depth <= 0)
    throw NumericalError("adaptive_simpson: depth exhausted near [" +
                         std::to_string(a) + ", " + std::to_string(b) +
                         "], residual " + std::to_string(err));
  return adaptive_step(fn, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(fn, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double a,
                        double b, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  const double whole = simpson(a, fa, b, fb, fm);
  const double scale = std::max({std::abs(whole), std::abs(b - a) * std::abs(fm),
                                 1e-300});
  return adaptive_step(fn, a, fa, b, fb, fm, whole, rel_tol * scale, max_depth);
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw ContractViolation("geometric_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double ratio = std::pow(hi / lo, 1.0 / (n - 1));
  double v = lo;
  for (int i = 0; i < n; ++i) {
    g[i] = v;
    v *= ratio;
  }
  g.back() = hi;
  return g;
}

double invert_nondecreasing(const std::function<double(double)>& fn,
                            double target, double lo, double hi,
                            double rel_tol) {
  if (!(hi > lo)) throw ContractViolation("invert_nondecreasing: bad bracket");
  int guard = 0;
  while (fn(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000 || !std::isfinite(hi))
      throw NumericalError("invert_nondecreasing: no upper bracket (density may stay below target)");
  }
  while (hi - lo > rel_tol * (std::abs(lo) + std::abs(hi) + 1.0)) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (fn(mid) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ContractViolation("least_squares_slope: need two aligned samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw NumericalError("least_squares_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace pbif
