#pragma once

#include <vector>

#include "pbif/nonlinearity.hpp"
#include "pbif/radial_mesh.hpp"

namespace pbif {

// State-independent data of the radial p-Laplace equation
//   -div(|u'|^{p-2} u') = lambda V |u|^{p-2} u + m f(u_+)
// in flux form with weight r^{dimension-1}. delta_reg smooths the flux
// density (g^2 + delta_reg^2)^{(p-2)/2} g so Jacobians stay finite at flat
// slopes; reaction uses the positive part of u.
struct OperatorConfig {
  double p = 2.0;
  int dimension = 3;
  double lambda = 0.0;
  double delta_reg = 1e-10;
  GridFunction V;
  GridFunction m;
  const Nonlinearity* f = nullptr;  // may be null only if m is identically zero
};

// Regularized flux density and its derivative.
double flux_density(double g, double p, double delta_reg);
double flux_density_prime(double g, double p, double delta_reg);

// Nodal residual; Dirichlet rows carry 0 (identity rows in the Jacobian).
// At a ball center the inner flux is zero (symmetry).
GridFunction residual(const GridFunction& u, const OperatorConfig& cfg,
                      const RadialMesh& mesh);

struct TridiagonalSystem {
  std::vector<double> sub, diag, super;  // sub[0] and super[n-1] unused
  std::size_t size() const { return diag.size(); }
};

// Exact tridiagonal Jacobian of the residual. Throws NumericalError for
// p < 2 with delta_reg == 0 at an exactly flat slope (singular linearization).
TridiagonalSystem jacobian(const GridFunction& u, const OperatorConfig& cfg,
                           const RadialMesh& mesh);

// d(residual)/d(lambda); zero at Dirichlet rows.
std::vector<double> lambda_derivative(const GridFunction& u,
                                      const OperatorConfig& cfg,
                                      const RadialMesh& mesh);

// LU with partial pivoting specialized to tridiagonal systems; throws
// NumericalError on an exactly zero pivot.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& T,
                                      std::vector<double> rhs);

// y = T x.
std::vector<double> tridiagonal_apply(const TridiagonalSystem& T,
                                      const std::vector<double>& x);

}  // namespace pbif
