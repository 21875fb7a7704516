#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pbif/eigensolver.hpp"
#include "pbif/plaplace_operator.hpp"
#include "pbif/radial_mesh.hpp"

namespace pbif {

// One accepted solution (lambda, u) along a branch with its reporting norms.
struct BranchPoint {
  double lambda = 0.0;
  GridFunction u;
  double sup_norm = 0.0;
  double lp_star_norm = 0.0;
  double sobolev_norm = 0.0;
  double tangent_dlambda = 0.0;  // lambda component of the unit secant tangent
  bool is_fold = false;
  double residual_norm = 0.0;  // sup-norm of the equation residual at (lambda, u)
};

enum class BranchOrigin { lambda_1, lambda_minus_1 };

enum class BranchTermination {
  reconnected,      // amplitude and lambda both back at the opposite eigenvalue
  norm_cap,         // sup-norm exceeded the cap ("unbounded at desk scale";
                    // not a proof of unboundedness)
  lambda_cap,       // lambda left the requested window
  step_failure,     // corrector kept failing at the minimum step
  positivity_lost,  // corrector converged to a sign-changing solution
};

struct Branch {
  std::vector<BranchPoint> points;
  BranchOrigin origin = BranchOrigin::lambda_1;
  BranchTermination termination = BranchTermination::step_failure;
  std::string diagnostic;
};

struct NewtonResult {
  GridFunction u;
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual_sup = std::numeric_limits<double>::infinity();
};

// Damped Newton at fixed lambda on the regularized residual; success means
// the residual sup-norm dropped below tol with the last damping step
// accepted. Failure returns the last iterate and residual.
NewtonResult newton_solve(double lambda, const GridFunction& u0,
                          const OperatorConfig& cfg, const RadialMesh& mesh,
                          double tol = 1e-11, int max_iter = 50);

// Newton on the extended system { residual = 0, u[pin] = amplitude } with
// lambda free; pin is the argmax node of u0. Used to seed a branch at finite
// amplitude where the Jacobian alone may be nearly singular. Takes at least
// one correction step even when the initial merit is already below tol, so
// the returned pair is a genuine solve rather than the caller's guess.
NewtonResult amplitude_pinned_solve(double lambda0, const GridFunction& u0,
                                    double amplitude,
                                    const OperatorConfig& cfg,
                                    const RadialMesh& mesh, double tol = 1e-11,
                                    int max_iter = 60);

enum class BifurcationSide { right, left };

// First guess on the branch emanating from a principal eigenpair:
// u = epsilon * eigenfunction, lambda offset to the requested side by
// 0.02*|lambda| by default. epsilon = 0 reproduces the trivial pair exactly.
struct PredictorGuess {
  double lambda = 0.0;
  GridFunction u;
};
PredictorGuess bifurcation_predictor(const EigenResult& e, double epsilon,
                                     BifurcationSide side,
                                     double lambda_offset_rel = 0.02);

// Corrected points at the given amplitudes (ascending), lambda free; the
// returned points satisfy the residual tolerance and carry their norms.
// Throws NumericalError if a seed fails to converge.
std::vector<BranchPoint> seed_branch(const EigenResult& e, BifurcationSide side,
                                     const std::vector<double>& amplitudes,
                                     const OperatorConfig& cfg,
                                     const RadialMesh& mesh,
                                     double tol = 1e-12);

struct TraceOptions {
  // step control (pseudo-arclength in the scaled (u, lambda) metric)
  double step0 = 0.01;
  double min_step = 1e-9;
  double max_step = 0.5;
  double newton_tol = 1e-11;
  int newton_max_iter = 30;
  int max_points = 20000;

  // caps
  double norm_cap = 1e3;
  double lambda_lo = -std::numeric_limits<double>::infinity();
  double lambda_hi = std::numeric_limits<double>::infinity();

  // reconnection target (the opposite principal eigenvalue); NaN disables
  double reconnect_lambda = std::numeric_limits<double>::quiet_NaN();
  double reconnect_norm_tol = 1e-10;
  double reconnect_lambda_tol = std::numeric_limits<double>::quiet_NaN();

  // initial tangent; empty tangent_u falls back to the direction of start.u
  std::vector<double> tangent_u;
  double tangent_lambda = 1.0;
};

// Pseudo-arclength tracing: secant tangents, arclength constraint appended to
// the Newton system (solved by block elimination with one iterative-refinement
// pass), step halving on corrector failure and growth on fast convergence.
// Termination per BranchTermination; a sign-changing corrector limit truncates
// the branch without appending the offending point.
Branch trace_branch(const BranchPoint& start, const OperatorConfig& cfg,
                    const RadialMesh& mesh, BranchOrigin origin,
                    const TraceOptions& opts);

// Indices k where tangent_dlambda changes sign between points k and k+1; the
// earlier index is reported and marked is_fold.
std::vector<std::size_t> detect_folds(Branch& b);

}  // namespace pbif
