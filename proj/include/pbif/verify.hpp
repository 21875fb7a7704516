#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pbif/continuation.hpp"
#include "pbif/eigensolver.hpp"
#include "pbif/nonlinearity.hpp"
#include "pbif/radial_mesh.hpp"
#include "pbif/weights.hpp"

namespace pbif {

// Cell-midpoint values of the two sides of the gradient comparison identity
//   L = |Dv1|^p + (p-1)(v1/v2)^p |Dv2|^p - p (v1/v2)^{p-1} Dv1 |Dv2|^{p-2} Dv2
//   R = |Dv1|^p - |Dv2|^{p-2} Dv2 . D(v1^p / v2^{p-1})
// L is pointwise nonnegative by Young's inequality; L and R agree in the
// continuum, so their discrete gap must shrink under refinement.
struct PiconePair {
  std::vector<double> L, R;  // one value per mesh cell
};

// Requires v1 >= 0 and v2 > 0 at every node (callers shift v2 by a small
// epsilon to clear Dirichlet zeros); throws ContractViolation otherwise.
PiconePair picone(const GridFunction& v1, const GridFunction& v2,
                  const RadialMesh& mesh, double p);

enum class CheckStatus { pass, fail, inconclusive, not_applicable };

// Growth check of the a-priori sup-norm estimate along a branch: with
// x = log[(1 + |u|_{p*}^{1/(p-1)}) |u|_{p*}] and y = log h(|u|_inf), the
// fitted slope of y against x over points with sup-norm above the threshold
// must stay below (p*-1)p/N + epsilon + slack. Points below the threshold
// only feed the reported empirical constant sup(y - bound*x). Branches whose
// points fail the residual gate are not solutions and score not_applicable;
// fewer than 4 points above threshold is inconclusive.
struct LinfReport {
  CheckStatus status = CheckStatus::inconclusive;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double exponent_bound = 0.0;  // (p*-1)p/N + epsilon
  double empirical_constant = -std::numeric_limits<double>::infinity();
  int points_used = 0;
  double threshold = 0.5;
  double slack = 0.1;
};

LinfReport linf_estimate_check(const Branch& b, const Nonlinearity& f, double p,
                               int dimension, double epsilon,
                               double lambda_bound, double V_sup,
                               double threshold = 0.5, double slack = 0.1,
                               double residual_tol = 1e-8);

// Lambda window outside which no positive solution can exist, assembled from
// principal eigenvalues on the components of {m >= 0} (scaled by
// alpha = 1 + C0 sup m+ / lambda_1({m >= 0})) and of int{m = 0}; the two
// windows are intersected when both apply. Ends are +-infinity where the
// needed sign mass of V is absent.
struct WindowReport {
  bool from_plus0 = false;  // window (i) assembled
  bool from_zero = false;   // window (ii) assembled
  double plus0_lo = -std::numeric_limits<double>::infinity();
  double plus0_hi = std::numeric_limits<double>::infinity();
  double zero_lo = -std::numeric_limits<double>::infinity();
  double zero_hi = std::numeric_limits<double>::infinity();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double alpha_plus0 = std::numeric_limits<double>::quiet_NaN();
  double C0 = std::numeric_limits<double>::quiet_NaN();
  double sup_m_plus = 0.0;
  double lambda1_plus0_weight1 = std::numeric_limits<double>::quiet_NaN();
  MHypothesesReport hypotheses;
  std::string note;
};

WindowReport nonexistence_window(const WeightSpec& V, const WeightSpec& m,
                                 const Nonlinearity& f, const RadialMesh& mesh,
                                 double p, double eig_tol = 1e-9);

// Sign of int m g0(phi) phi dx with g0 in its power form t^{q-1}, q taken
// from the zero-limit homogeneity of f. A negative integral sends the branch
// to the right of lambda_1 and to the left of lambda_minus_1; a nonnegative
// one violates the transversality hypothesis.
enum class BifSide { right, left, hypothesis_violated };

struct DirectionReport {
  double integral = 0.0;
  double g0_q = 0.0;
  BifSide from_lambda1 = BifSide::hypothesis_violated;
  BifSide from_lambda_minus1 = BifSide::hypothesis_violated;
};

DirectionReport bifurcation_direction(const GridFunction& m,
                                      const EigenResult& e,
                                      const Nonlinearity& f,
                                      const RadialMesh& mesh);

}  // namespace pbif
