#pragma once

#include <functional>
#include <vector>

namespace pbif {

// Adaptive Simpson quadrature of fn over [a, b]. Subdivides until the local
// Richardson error estimate meets rel_tol against the running magnitude.
// Throws NumericalError if max_depth is exhausted before the tolerance holds.
double adaptive_simpson(const std::function<double(double)>& fn, double a,
                        double b, double rel_tol = 1e-10, int max_depth = 60);

// n points from lo to hi inclusive with constant ratio. Requires lo, hi > 0.
std::vector<double> geometric_grid(double lo, double hi, int n);

// Solves fn(x) = target for nondecreasing fn by bisection on [lo, hi].
// The bracket is expanded by doubling if fn(hi) < target. Returns the left
// limit at jumps, i.e. sup{x : fn(x) <= target}.
double invert_nondecreasing(const std::function<double(double)>& fn,
                            double target, double lo, double hi,
                            double rel_tol = 1e-13);

// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y);

// Surface area of the unit (dim-1)-sphere in R^dim.
double unit_sphere_area(int dim);

}  // namespace pbif
