#pragma once

#include <vector>

#include "pbif/radial_mesh.hpp"

namespace pbif {

// Dense polynomial in r, coeffs[k] multiplying r^k.
struct Polynomial {
  std::vector<double> coeffs;

  double eval(double r) const;
  Polynomial derivative() const;
  int degree() const;
};

// All real roots of poly in [lo, hi], ascending, deduplicated. Found by
// recursively splitting at the roots of the derivative so each piece is
// monotone, then bisecting; no root inside the interval can be skipped
// short of floating-point ties.
std::vector<double> polynomial_roots_in(const Polynomial& poly, double lo,
                                        double hi);

struct WeightPiece {
  double lo = 0.0, hi = 0.0;  // [lo, hi)
  Polynomial poly;
};

// Piecewise polynomial weight. Pieces must be contiguous and ordered; together
// they must cover the mesh domain exactly.
struct WeightSpec {
  std::vector<WeightPiece> pieces;

  double lo() const;
  double hi() const;
  double eval(double r) const;  // throws ContractViolation outside the cover
};

// Nodal samples of w on the mesh; throws if any node is uncovered.
GridFunction evaluate(const WeightSpec& w, const RadialMesh& mesh);

struct Interval {
  double lo = 0.0, hi = 0.0;
  double length() const { return hi - lo; }
};

// Open-interval decomposition of {w > tol}, {w < -tol}, {|w| <= tol}, plus
// the derived components of int({w >= -tol}) and int({|w| <= tol}). Intervals
// of zero length (isolated roots) are dropped.
struct SignDecomposition {
  std::vector<Interval> positive_set;
  std::vector<Interval> negative_set;
  std::vector<Interval> zero_set;
  std::vector<Interval> omega_plus0;  // components of int(positive ∪ zero)
  std::vector<Interval> omega_0;      // components of int(zero)
};

SignDecomposition sign_decompose(const WeightSpec& w, double tolerance = 0.0);

// Verdicts for the sign-structure hypotheses on the pair (m, V).
struct MHypothesesReport {
  bool m1 = false;           // sup m+ > 0 and sup m- > 0
  double sup_m_plus = 0.0;
  double sup_m_minus = 0.0;

  bool m2 = false;           // finitely many components of omega_plus0 and
  bool m2_v_plus = false;    // V > 0 on a positive-measure subset of it
  bool m2_v_minus = false;   // V < 0 likewise
  int omega_plus0_components = 0;

  bool m3 = false;           // same pair of sign conditions on omega_0
  bool m3_v_plus = false;
  bool m3_v_minus = false;
  int omega_0_components = 0;
};

MHypothesesReport check_m_hypotheses(const WeightSpec& m, const WeightSpec& V,
                                     const SignDecomposition& d,
                                     const RadialMesh& mesh);

// Exact maximum of the piecewise polynomial over its cover.
double weight_max(const WeightSpec& w);

}  // namespace pbif
