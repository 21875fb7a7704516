#include "pbif/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pbif/errors.hpp"

namespace pbif {

namespace {
constexpr double kCoverSlack = 1e-12;
}

double Polynomial::eval(double r) const {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * r + coeffs[k];
  return acc;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  if (coeffs.size() <= 1) return d;
  d.coeffs.resize(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    d.coeffs[k - 1] = coeffs[k] * static_cast<double>(k);
  return d;
}

int Polynomial::degree() const {
  for (std::size_t k = coeffs.size(); k-- > 0;)
    if (coeffs[k] != 0.0) return static_cast<int>(k);
  return -1;
}

namespace {

// Bisection on a sign change; the decision uses sign(f(mid)) * sign(f(a)), so
// negating the polynomial walks the identical midpoint sequence. That makes
// sign_decompose(-w) bit-exact mirrors of sign_decompose(w).
double bisect_root(const Polynomial& p, double a, double b) {
  double fa = p.eval(a);
  if (fa == 0.0) return a;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = p.eval(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> polynomial_roots_in(const Polynomial& poly, double lo,
                                        double hi) {
  std::vector<double> roots;
  const int deg = poly.degree();
  if (deg <= 0 || !(hi > lo)) return roots;  // constants have no isolated roots
  if (deg == 1) {
    const double r = -poly.coeffs[0] / poly.coeffs[1];
    if (r >= lo && r <= hi) roots.push_back(r);
    return roots;
  }

  // Split at critical points; poly is monotone between consecutive ones.
  std::vector<double> cuts = polynomial_roots_in(poly.derivative(), lo, hi);
  cuts.insert(cuts.begin(), lo);
  cuts.push_back(hi);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (!(b > a)) continue;
    const double fa = poly.eval(a), fb = poly.eval(b);
    if (fa == 0.0) roots.push_back(a);
    if (fa * fb < 0.0) roots.push_back(bisect_root(poly, a, b));
  }
  if (poly.eval(hi) == 0.0) roots.push_back(hi);

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [&](double x, double y) {
                            return std::abs(x - y) <=
                                   1e-14 * (std::abs(x) + std::abs(y) + 1.0);
                          }),
              roots.end());
  return roots;
}

double WeightSpec::lo() const {
  if (pieces.empty()) throw ContractViolation("WeightSpec: no pieces");
  return pieces.front().lo;
}

double WeightSpec::hi() const {
  if (pieces.empty()) throw ContractViolation("WeightSpec: no pieces");
  return pieces.back().hi;
}

double WeightSpec::eval(double r) const {
  if (pieces.empty()) throw ContractViolation("WeightSpec: no pieces");
  if (r < pieces.front().lo - kCoverSlack || r > pieces.back().hi + kCoverSlack)
    throw ContractViolation("WeightSpec: point " + std::to_string(r) +
                            " outside the covered interval");
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const bool last = (k + 1 == pieces.size());
    if (r < pieces[k].hi || (last && r <= pieces[k].hi + kCoverSlack))
      return pieces[k].poly.eval(r);
  }
  return pieces.back().poly.eval(r);
}

namespace {

void validate_pieces(const WeightSpec& w) {
  if (w.pieces.empty()) throw ContractViolation("WeightSpec: no pieces");
  for (std::size_t k = 0; k < w.pieces.size(); ++k) {
    if (!(w.pieces[k].hi > w.pieces[k].lo))
      throw ContractViolation("WeightSpec: piece " + std::to_string(k) +
                              " has nonpositive length");
    if (k > 0 &&
        std::abs(w.pieces[k].lo - w.pieces[k - 1].hi) > kCoverSlack)
      throw ContractViolation("WeightSpec: pieces " + std::to_string(k - 1) +
                              " and " + std::to_string(k) +
                              " are not contiguous");
  }
}

}  // namespace

GridFunction evaluate(const WeightSpec& w, const RadialMesh& mesh) {
  validate_pieces(w);
  if (w.lo() > mesh.inner() + kCoverSlack || w.hi() < mesh.outer() - kCoverSlack)
    throw ContractViolation("evaluate: weight pieces do not cover the mesh domain");
  GridFunction g;
  g.values.resize(mesh.node_count());
  g.dirichlet_mask.assign(mesh.node_count(), 0);  // weights are data, not states
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    g.values[i] = w.eval(mesh.nodes[i]);
  return g;
}

namespace {

enum class SignClass { positive, negative, zero };

struct Classified {
  Interval iv;
  SignClass cls;
};

std::vector<Interval> merge(std::vector<Interval> ivs) {
  std::sort(ivs.begin(), ivs.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const Interval& iv : ivs) {
    if (!(iv.length() > 0.0)) continue;
    if (!out.empty() && iv.lo <= out.back().hi + kCoverSlack)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

}  // namespace

SignDecomposition sign_decompose(const WeightSpec& w, double tolerance) {
  validate_pieces(w);
  if (tolerance < 0.0)
    throw ContractViolation("sign_decompose: tolerance must be >= 0");

  std::vector<Classified> parts;
  for (const WeightPiece& piece : w.pieces) {
    // Breakpoints where the classification can change: crossings of +tol
    // and -tol (they coincide when tolerance == 0).
    std::vector<double> cuts{piece.lo, piece.hi};
    Polynomial up = piece.poly, down = piece.poly;
    if (up.coeffs.empty()) up.coeffs.push_back(0.0);
    if (down.coeffs.empty()) down.coeffs.push_back(0.0);
    up.coeffs[0] -= tolerance;
    down.coeffs[0] += tolerance;
    for (double r : polynomial_roots_in(up, piece.lo, piece.hi)) cuts.push_back(r);
    if (tolerance > 0.0)
      for (double r : polynomial_roots_in(down, piece.lo, piece.hi))
        cuts.push_back(r);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Interval iv{cuts[k], cuts[k + 1]};
      if (!(iv.length() > 0.0)) continue;
      const double v = piece.poly.eval(0.5 * (iv.lo + iv.hi));
      SignClass cls = SignClass::zero;
      if (v > tolerance)
        cls = SignClass::positive;
      else if (v < -tolerance)
        cls = SignClass::negative;
      parts.push_back({iv, cls});
    }
  }

  SignDecomposition d;
  std::vector<Interval> plus0;
  for (const Classified& c : parts) {
    switch (c.cls) {
      case SignClass::positive: d.positive_set.push_back(c.iv); break;
      case SignClass::negative: d.negative_set.push_back(c.iv); break;
      case SignClass::zero: d.zero_set.push_back(c.iv); break;
    }
    if (c.cls != SignClass::negative) plus0.push_back(c.iv);
  }
  d.positive_set = merge(d.positive_set);
  d.negative_set = merge(d.negative_set);
  d.zero_set = merge(d.zero_set);
  d.omega_plus0 = merge(plus0);
  d.omega_0 = d.zero_set;  // zero intervals of positive length only
  return d;
}

namespace {

// Exact sup of the polynomial over [lo, hi]: check endpoints and critical
// points.
double piece_max(const Polynomial& p, double lo, double hi) {
  double m = std::max(p.eval(lo), p.eval(hi));
  for (double r : polynomial_roots_in(p.derivative(), lo, hi))
    m = std::max(m, p.eval(r));
  return m;
}

double overlap_length(const std::vector<Interval>& a,
                      const std::vector<Interval>& b) {
  double len = 0.0;
  for (const Interval& x : a)
    for (const Interval& y : b) {
      const double lo = std::max(x.lo, y.lo), hi = std::min(x.hi, y.hi);
      if (hi > lo) len += hi - lo;
    }
  return len;
}

}  // namespace

double weight_max(const WeightSpec& w) {
  validate_pieces(w);
  double m = -std::numeric_limits<double>::infinity();
  for (const WeightPiece& piece : w.pieces)
    m = std::max(m, piece_max(piece.poly, piece.lo, piece.hi));
  return m;
}

MHypothesesReport check_m_hypotheses(const WeightSpec& m, const WeightSpec& V,
                                     const SignDecomposition& d,
                                     const RadialMesh& mesh) {
  validate_pieces(m);
  validate_pieces(V);
  if (m.lo() > mesh.inner() + kCoverSlack || m.hi() < mesh.outer() - kCoverSlack ||
      V.lo() > mesh.inner() + kCoverSlack || V.hi() < mesh.outer() - kCoverSlack)
    throw ContractViolation("check_m_hypotheses: weights do not cover the mesh domain");

  MHypothesesReport rep;
  rep.sup_m_plus = std::max(0.0, weight_max(m));
  WeightSpec neg = m;
  for (WeightPiece& piece : neg.pieces)
    for (double& c : piece.poly.coeffs) c = -c;
  rep.sup_m_minus = std::max(0.0, weight_max(neg));
  rep.m1 = rep.sup_m_plus > 0.0 && rep.sup_m_minus > 0.0;

  const SignDecomposition dv = sign_decompose(V, 0.0);
  rep.omega_plus0_components = static_cast<int>(d.omega_plus0.size());
  rep.m2_v_plus = overlap_length(d.omega_plus0, dv.positive_set) > 0.0;
  rep.m2_v_minus = overlap_length(d.omega_plus0, dv.negative_set) > 0.0;
  rep.m2 = !d.omega_plus0.empty() && rep.m2_v_plus && rep.m2_v_minus;

  rep.omega_0_components = static_cast<int>(d.omega_0.size());
  rep.m3_v_plus = overlap_length(d.omega_0, dv.positive_set) > 0.0;
  rep.m3_v_minus = overlap_length(d.omega_0, dv.negative_set) > 0.0;
  rep.m3 = !d.omega_0.empty() && rep.m3_v_plus && rep.m3_v_minus;
  return rep;
}

}  // namespace pbif
