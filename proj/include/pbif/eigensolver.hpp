#pragma once

#include <vector>

#include "pbif/radial_mesh.hpp"
#include "pbif/weights.hpp"

namespace pbif {

enum class EigenStatus { converged, no_sign_mass, max_iter };

struct EigenResult {
  double lambda = 0.0;
  GridFunction eigenfunction;  // sup-norm 1, positive in the interior
  int iterations = 0;
  double kkt_residual = 0.0;
  EigenStatus status = EigenStatus::max_iter;
  double multistart_spread = 0.0;  // disagreement across converged starts
  bool positive = false;
};

// Principal eigenvalue of the weighted radial p-Laplacian:
//   sign=+1: inf of the gradient energy over { int V |u|^p = 1 }
//   sign=-1: the negative counterpart, returned as -principal(+1, -V).
// Computed by projected stiffness-preconditioned gradient descent on the
// Rayleigh quotient with Armijo backtracking, renormalizing onto the
// constraint each step; three deterministic bump starts, smallest quotient
// wins, the spread is reported. The winning iterate is then polished by a
// pinned Newton solve of the eigen-system, which pushes the eigenfunction
// error down to the linear-solver floor. Returns lambda = +inf (sign=+1) or
// -inf (sign=-1) with status no_sign_mass when sign*V <= 0 on every node that
// carries quadrature weight.
EigenResult principal_eigenvalue(const GridFunction& V, const RadialMesh& mesh,
                                 double p, int sign, double tol = 1e-9,
                                 int max_iter = 50000);

// Eigenvalue of the restriction to one component interval: a uniform submesh
// at the parent's average spacing (>= 33 nodes), V interpolated linearly,
// Dirichlet pins at the restriction endpoints except a ball center. A
// component spanning the whole domain reuses the parent mesh verbatim.
double subdomain_eigenvalue(const GridFunction& V, const Interval& component,
                            const RadialMesh& mesh, double p, int sign,
                            double tol = 1e-9);

// Aggregate over a component list: inf of the per-component values for
// sign=+1, sup for sign=-1. An empty list yields the respective sentinel.
double eigenvalue_on_components(const GridFunction& V,
                                const std::vector<Interval>& components,
                                const RadialMesh& mesh, double p, int sign,
                                double tol = 1e-9);

}  // namespace pbif
