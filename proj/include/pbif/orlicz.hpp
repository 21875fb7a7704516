#pragma once

#include <functional>
#include <vector>

#include "pbif/nonlinearity.hpp"
#include "pbif/radial_mesh.hpp"

namespace pbif {

// N-function A(t) = int_0^t a(s) ds described by its density a: nondecreasing,
// right-continuous, a(0) = 0, a -> infinity. `value` and `inverse_density`
// are optional closed forms; when absent they are computed by adaptive
// quadrature resp. bisection.
struct NFunction {
  std::function<double(double)> density;
  std::function<double(double)> value;            // may be empty
  std::function<double(double)> inverse_density;  // may be empty
  bool strictly_increasing = true;
};

// Validates the density on a sample grid (a(0) = 0, nondecreasing and finite
// samples) and returns the wrapped N-function. Throws ConfigError naming the
// offending sample otherwise.
NFunction make_nfunction(std::function<double(double)> density,
                         double check_lo = 1e-6, double check_hi = 1e6,
                         int check_samples = 120);

// A(t) = coef * t^exponent with closed-form value and inverse density.
NFunction power_nfunction(double exponent, double coef = 1.0);

// Piecewise-linear density through (t_k, a_k); extended past the last sample
// by its final slope.
NFunction nfunction_from_table(std::vector<double> t, std::vector<double> a);

// N-function whose density is the reaction term itself (requires strict
// monotonicity; make_nfunction's validation enforces it).
NFunction nfunction_from_reaction(const Nonlinearity& f);

double nf_value(const NFunction& A, double t);
double nf_density(const NFunction& A, double t);

// Conjugate density a*(t) = sup{ s : a(s) <= t }; the conjugate N-function
// integrates it. Closed forms are carried through when available.
NFunction conjugate(const NFunction& A);

// Luxemburg gauge inf{ k > 0 : int A(|u|/k) <= 1 } on the mesh volume
// measure; 0 for the zero function. Bisection to 1e-10 relative.
double gauge_norm(const GridFunction& u, const NFunction& A,
                  const RadialMesh& mesh);

struct Delta2Result {
  bool satisfied = false;
  double k0 = 0.0;       // sup of t a(t)/A(t) over the grid
  double witness_t = 0.0;
  bool tail_diverging = false;
};

// Doubling growth near infinity via the ratio t a(t)/A(t) on the given grid:
// satisfied iff the ratio stays bounded and its tail is not still climbing.
Delta2Result check_delta2(const NFunction& A, const std::vector<double>& t_grid);

// True iff B(delta t)/A(t) decays along the tail of t_grid for every sampled
// delta: monotone nonincreasing tail, and either below abs_tol or with at
// least 1% net decay (a finite-grid surrogate for the limit being 0).
bool check_essentially_slower(const NFunction& B, const NFunction& A,
                              const std::vector<double>& delta_grid,
                              const std::vector<double>& t_grid,
                              double abs_tol = 1e-4);

// A(s) + A*(t) - s t; nonnegative up to the tolerance of the conjugate
// evaluation, vanishing on t = a(s).
double young_gap(double s, double t, const NFunction& A);

struct HolderResult {
  double lhs = 0.0;  // |int u v|
  double rhs = 0.0;  // 2 ||u||_A ||v||_{A*}
  bool ok = false;
};

HolderResult holder_check(const GridFunction& u, const GridFunction& v,
                          const NFunction& A, const RadialMesh& mesh);

struct CompactnessReport {
  Delta2Result delta2;           // for A = conjugate of the primitive of f
  bool essentially_slower = false;  // primitive of f vs t^{p*}
  double certified_c0 = 0.0;
  double k0_bound = 0.0;         // c0/(c0-1)
  bool k0_within_bound = false;
  bool pass = false;
};

// Growth/compactness package for the reaction term: builds the N-function
// with density f, its conjugate A (sampled exactly at t = f(s) through
// Young's equality), checks doubling of A past f(s0) and that the primitive
// of f grows essentially more slowly than t^{p*}.
CompactnessReport compactness_hypotheses(const Nonlinearity& f, double p,
                                         int dimension);

}  // namespace pbif
