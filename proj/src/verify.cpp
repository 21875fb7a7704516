#include "pbif/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pbif/errors.hpp"
#include "pbif/numerics.hpp"

namespace pbif {

namespace {

double signed_pow(double g, double e) {
  if (g == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(g), e), g);
}

}  // namespace

PiconePair picone(const GridFunction& v1, const GridFunction& v2,
                  const RadialMesh& mesh, double p) {
  const std::size_t n = mesh.node_count();
  if (v1.values.size() != n || v2.values.size() != n)
    throw ContractViolation("picone: functions do not match the mesh");
  if (!(p > 1.0)) throw ContractViolation("picone: requires p > 1");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v1.values[i] >= 0.0))
      throw ContractViolation("picone: v1 must be nonnegative");
    if (!(v2.values[i] > 0.0))
      throw ContractViolation("picone: v2 must be strictly positive");
  }

  PiconePair out;
  out.L.resize(n - 1);
  out.R.resize(n - 1);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double h = mesh.cell_width[c];
    const double g1 = (v1.values[c + 1] - v1.values[c]) / h;
    const double g2 = (v2.values[c + 1] - v2.values[c]) / h;
    const double v1m = 0.5 * (v1.values[c] + v1.values[c + 1]);
    const double v2m = 0.5 * (v2.values[c] + v2.values[c + 1]);
    const double t = v1m / v2m;

    const double a1 = std::pow(std::abs(g1), p);
    const double a2 = std::pow(std::abs(g2), p);
    const double flux2 = signed_pow(g2, p - 1.0);  // |g2|^{p-2} g2

    out.L[c] = a1 + (p - 1.0) * std::pow(t, p) * a2 -
               p * std::pow(t, p - 1.0) * g1 * flux2;

    const double w_lo =
        std::pow(v1.values[c], p) / std::pow(v2.values[c], p - 1.0);
    const double w_hi =
        std::pow(v1.values[c + 1], p) / std::pow(v2.values[c + 1], p - 1.0);
    out.R[c] = a1 - flux2 * (w_hi - w_lo) / h;
  }
  return out;
}

LinfReport linf_estimate_check(const Branch& b, const Nonlinearity& f, double p,
                               int dimension, double epsilon,
                               double lambda_bound, double V_sup,
                               double threshold, double slack,
                               double residual_tol) {
  if (!(epsilon > 0.0))
    throw ContractViolation("linf_estimate_check: epsilon must be > 0");

  LinfReport rep;
  rep.exponent_bound =
      (f.p_star - 1.0) * p / static_cast<double>(dimension) + epsilon;
  rep.threshold = threshold;
  rep.slack = slack;
  if (b.points.empty()) return rep;

  for (const BranchPoint& bp : b.points) {
    if (!(bp.residual_norm <= residual_tol)) {
      rep.status = CheckStatus::not_applicable;
      return rep;
    }
  }

  std::vector<double> xs, ys;
  for (const BranchPoint& bp : b.points) {
    const double s = bp.sup_norm;
    const double lq = bp.lp_star_norm;
    if (!(s > 0.0) || !std::isfinite(lq) || !(lq > 0.0)) continue;
    const double x = std::log((1.0 + std::pow(lq, 1.0 / (p - 1.0))) * lq);
    const double hv = h_of(f, s, lambda_bound, V_sup, p);
    if (!(hv > 0.0) || !std::isfinite(hv) || !std::isfinite(x)) continue;
    const double y = std::log(hv);
    rep.empirical_constant =
        std::max(rep.empirical_constant, y - rep.exponent_bound * x);
    if (s >= threshold) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }

  rep.points_used = static_cast<int>(xs.size());
  if (xs.size() < 4) {
    rep.status = CheckStatus::inconclusive;
    return rep;
  }
  rep.slope = least_squares_slope(xs, ys);
  rep.status = rep.slope <= rep.exponent_bound + slack ? CheckStatus::pass
                                                       : CheckStatus::fail;
  return rep;
}

WindowReport nonexistence_window(const WeightSpec& V, const WeightSpec& m,
                                 const Nonlinearity& f, const RadialMesh& mesh,
                                 double p, double eig_tol) {
  WindowReport rep;
  const SignDecomposition d = sign_decompose(m);
  rep.hypotheses = check_m_hypotheses(m, V, d, mesh);
  rep.C0 = compute_C0(f, p);
  rep.sup_m_plus = rep.hypotheses.sup_m_plus;

  const GridFunction Vg = evaluate(V, mesh);
  GridFunction ones;
  ones.values.assign(mesh.node_count(), 1.0);
  ones.dirichlet_mask.assign(mesh.node_count(), 0);

  if (rep.hypotheses.m1 && !d.omega_plus0.empty()) {
    rep.from_plus0 = true;
    rep.lambda1_plus0_weight1 =
        eigenvalue_on_components(ones, d.omega_plus0, mesh, p, 1, eig_tol);
    double alpha = 1.0;
    if (rep.C0 > 0.0) {
      if (!std::isfinite(rep.C0)) {
        alpha = std::numeric_limits<double>::infinity();
      } else if (std::isfinite(rep.lambda1_plus0_weight1) &&
                 rep.lambda1_plus0_weight1 > 0.0) {
        alpha = 1.0 + rep.C0 * rep.sup_m_plus / rep.lambda1_plus0_weight1;
      }
    }
    rep.alpha_plus0 = alpha;

    const double lam_p =
        eigenvalue_on_components(Vg, d.omega_plus0, mesh, p, 1, eig_tol);
    const double lam_m =
        eigenvalue_on_components(Vg, d.omega_plus0, mesh, p, -1, eig_tol);
    rep.plus0_hi = alpha * lam_p;  // +inf propagates
    rep.plus0_lo = alpha * lam_m;  // -inf propagates
  }

  if (!d.omega_0.empty()) {
    rep.from_zero = true;
    rep.zero_hi = eigenvalue_on_components(Vg, d.omega_0, mesh, p, 1, eig_tol);
    rep.zero_lo = eigenvalue_on_components(Vg, d.omega_0, mesh, p, -1, eig_tol);
  }

  if (rep.from_plus0 && rep.from_zero) {
    rep.lo = std::max(rep.plus0_lo, rep.zero_lo);
    rep.hi = std::min(rep.plus0_hi, rep.zero_hi);
    rep.note = "both windows assembled; reporting their intersection";
  } else if (rep.from_plus0) {
    rep.lo = rep.plus0_lo;
    rep.hi = rep.plus0_hi;
    rep.note = "window from the components of {m >= 0}";
  } else if (rep.from_zero) {
    rep.lo = rep.zero_lo;
    rep.hi = rep.zero_hi;
    rep.note = "window from the interior of {m = 0}";
  } else {
    rep.note =
        "neither sign-structure hypothesis applies; window is unbounded";
  }
  return rep;
}

DirectionReport bifurcation_direction(const GridFunction& m,
                                      const EigenResult& e,
                                      const Nonlinearity& f,
                                      const RadialMesh& mesh) {
  if (e.status != EigenStatus::converged)
    throw ContractViolation("bifurcation_direction: eigenpair did not converge");
  if (m.values.size() != mesh.node_count())
    throw ContractViolation("bifurcation_direction: m does not match the mesh");

  DirectionReport rep;
  rep.g0_q = g0_exponent(f);

  GridFunction integrand;
  integrand.values.assign(mesh.node_count(), 0.0);
  integrand.dirichlet_mask.assign(mesh.node_count(), 0);
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const double phi = std::max(0.0, e.eigenfunction.values[i]);
    // g0(phi) * phi with g0(s) = s^q and q the measured zero-limit exponent
    integrand.values[i] = m.values[i] * std::pow(phi, rep.g0_q + 1.0);
  }
  rep.integral = integrate(integrand, mesh);

  if (rep.integral < 0.0) {
    rep.from_lambda1 = BifSide::right;
    rep.from_lambda_minus1 = BifSide::left;
  } else {
    rep.from_lambda1 = BifSide::hypothesis_violated;
    rep.from_lambda_minus1 = BifSide::hypothesis_violated;
  }
  return rep;
}

}  // namespace pbif
