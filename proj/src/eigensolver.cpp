#include "pbif/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "pbif/continuation.hpp"
#include "pbif/errors.hpp"
#include "pbif/plaplace_operator.hpp"

namespace pbif {

namespace {

// Smoothing for |.|^p at the origin so gradients of the Rayleigh quotient
// stay finite for p < 2; small enough to leave 1e-9-level eigenvalues alone.
constexpr double kReg = 1e-14;

double smooth_abs_pow(double v, double p) {
  // (v^2 + kReg^2)^{p/2} - kReg^p, zero at v = 0.
  return std::pow(v * v + kReg * kReg, 0.5 * p) - std::pow(kReg, p);
}

double smooth_abs_pow_prime(double v, double p) {
  return p * std::pow(v * v + kReg * kReg, 0.5 * p - 1.0) * v;
}

double gradient_energy(const std::vector<double>& u, const RadialMesh& mesh,
                       double p) {
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < mesh.node_count(); ++c) {
    const double du = (u[c + 1] - u[c]) / mesh.cell_width[c];
    acc += mesh.cell_mid_weight[c] * smooth_abs_pow(du, p) * mesh.cell_width[c];
  }
  return mesh.surface_factor * acc;
}

std::vector<double> gradient_energy_grad(const std::vector<double>& u,
                                         const RadialMesh& mesh, double p) {
  const std::size_t n = mesh.node_count();
  std::vector<double> g(n, 0.0);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double du = (u[c + 1] - u[c]) / mesh.cell_width[c];
    const double flux =
        mesh.surface_factor * mesh.cell_mid_weight[c] * flux_density(du, p, kReg) * p;
    g[c] -= flux;
    g[c + 1] += flux;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (mesh.boundary_mask[i]) g[i] = 0.0;
  return g;
}

double weighted_mass(const std::vector<double>& u, const GridFunction& V,
                     const RadialMesh& mesh, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    acc += mesh.node_weight[i] * V.values[i] * smooth_abs_pow(u[i], p);
  return acc;
}

std::vector<double> weighted_mass_grad(const std::vector<double>& u,
                                       const GridFunction& V,
                                       const RadialMesh& mesh, double p) {
  const std::size_t n = mesh.node_count();
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mesh.boundary_mask[i]) continue;
    g[i] = mesh.node_weight[i] * V.values[i] * smooth_abs_pow_prime(u[i], p);
  }
  return g;
}

// Quadratic stiffness operator used as descent preconditioner for every p;
// identity rows at Dirichlet nodes, a tiny diagonal shift for safety.
TridiagonalSystem stiffness(const RadialMesh& mesh) {
  const std::size_t n = mesh.node_count();
  TridiagonalSystem K;
  K.sub.assign(n, 0.0);
  K.diag.assign(n, 0.0);
  K.super.assign(n, 0.0);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double k =
        mesh.surface_factor * mesh.cell_mid_weight[c] / mesh.cell_width[c];
    K.diag[c] += k;
    K.diag[c + 1] += k;
    K.super[c] -= k;
    K.sub[c + 1] -= k;
  }
  double max_diag = 0.0;
  for (double d : K.diag) max_diag = std::max(max_diag, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (mesh.boundary_mask[i]) {
      K.diag[i] = 1.0;
      K.super[i] = 0.0;
      K.sub[i] = 0.0;
      if (i > 0 && !mesh.boundary_mask[i - 1]) K.super[i - 1] = 0.0;
      if (i + 1 < n && !mesh.boundary_mask[i + 1]) K.sub[i + 1] = 0.0;
    } else {
      K.diag[i] += 1e-12 * max_diag;
    }
  }
  return K;
}

// Rescales u onto the unit mass level set; returns false if the mass is not
// positive (direction carries no usable sign mass).
bool normalize_mass(std::vector<double>& u, const GridFunction& V,
                    const RadialMesh& mesh, double p) {
  for (int pass = 0; pass < 2; ++pass) {
    const double b = weighted_mass(u, V, mesh, p);
    if (!(b > 0.0) || !std::isfinite(b)) return false;
    const double scale = std::pow(b, -1.0 / p);
    for (double& v : u) v *= scale;
  }
  return true;
}

// Piecewise-linear tent supported on [lo, hi] peaking at the given fraction.
std::vector<double> tent(const RadialMesh& mesh, double lo, double hi,
                         double frac) {
  const double peak = lo + frac * (hi - lo);
  std::vector<double> u(mesh.node_count(), 0.0);
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    if (mesh.boundary_mask[i]) continue;
    const double r = mesh.nodes[i];
    if (r <= lo || r >= hi) continue;
    const double up = peak > lo ? (r - lo) / (peak - lo) : 1.0;
    const double down = hi > peak ? (hi - r) / (hi - peak) : 1.0;
    u[i] = std::max(0.0, std::min(up, down));
  }
  return u;
}

struct IndexRun {
  std::size_t a = 0, b = 0;  // inclusive node range
  double span = 0.0;
};

// Deterministic bump starts: tents over the widest node runs where V > 0,
// peaks at midpoint plus quarter points of the widest run.
std::vector<std::vector<double>> candidate_starts(const GridFunction& V,
                                                  const RadialMesh& mesh,
                                                  double p) {
  const std::size_t n = mesh.node_count();
  std::vector<IndexRun> runs;
  std::size_t i = 0;
  while (i < n) {
    if (mesh.boundary_mask[i] || !(V.values[i] > 0.0)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && !mesh.boundary_mask[j + 1] && V.values[j + 1] > 0.0) ++j;
    runs.push_back({i, j, mesh.nodes[j] - mesh.nodes[i]});
    i = j + 1;
  }
  std::stable_sort(runs.begin(), runs.end(),
                   [](const IndexRun& x, const IndexRun& y) {
                     return x.span > y.span;
                   });

  std::vector<std::vector<double>> starts;
  auto push = [&](const IndexRun& run, double frac) {
    if (starts.size() >= 3) return;
    const double lo = mesh.nodes[run.a == 0 ? 0 : run.a - 1];
    const double hi = mesh.nodes[std::min(run.b + 1, n - 1)];
    std::vector<double> u = tent(mesh, lo, hi, frac);
    if (weighted_mass(u, V, mesh, p) > 0.0) starts.push_back(std::move(u));
  };
  for (const IndexRun& run : runs) push(run, 0.5);
  if (!runs.empty()) {
    push(runs.front(), 0.25);
    push(runs.front(), 0.75);
  }
  return starts;
}

struct DescentOutcome {
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> u;
  int iterations = 0;
  double kkt = std::numeric_limits<double>::infinity();
  bool converged = false;
};

DescentOutcome run_descent(std::vector<double> u, const GridFunction& V,
                           const RadialMesh& mesh, const TridiagonalSystem& K,
                           double p, double tol, int max_iter) {
  DescentOutcome out;
  if (!normalize_mass(u, V, mesh, p)) return out;

  double quotient = gradient_energy(u, mesh, p);
  double last_change = std::numeric_limits<double>::infinity();
  double step = 1.0;
  const std::size_t n = mesh.node_count();
  std::vector<double> grad(n), trial(n);

  for (int it = 0; it < max_iter; ++it) {
    const std::vector<double> ge = gradient_energy_grad(u, mesh, p);
    const std::vector<double> gb = weighted_mass_grad(u, V, mesh, p);
    double kkt = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      grad[k] = ge[k] - quotient * gb[k];
      kkt = std::max(kkt, std::abs(grad[k]));
    }
    out.iterations = it;
    out.kkt = kkt;
    const double scale = tol * (1.0 + std::abs(quotient));
    if (kkt <= scale && last_change <= scale) {
      out.converged = true;
      break;
    }

    std::vector<double> z = solve_tridiagonal(K, grad);
    double slope = 0.0;
    for (std::size_t k = 0; k < n; ++k) slope += grad[k] * z[k];
    if (!(slope > 0.0) || !std::isfinite(slope)) {
      z = grad;  // fall back to plain steepest descent
      slope = 0.0;
      for (double g : grad) slope += g * g;
      if (slope == 0.0) {
        out.converged = true;
        break;
      }
    }

    step = std::min(step * 2.0, 1e3);
    bool accepted = false;
    while (step >= 1e-14) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = u[k] - step * z[k];
      const double b = weighted_mass(trial, V, mesh, p);
      if (b > 0.0 && std::isfinite(b)) {
        const double q = gradient_energy(trial, mesh, p) / b;
        if (std::isfinite(q) && q <= quotient - 1e-4 * step * slope) {
          u = trial;
          quotient = q;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      // no admissible decrease left at machine scale: treat as stationary
      out.converged = out.kkt <= std::sqrt(tol) * (1.0 + std::abs(quotient));
      break;
    }
    if (!normalize_mass(u, V, mesh, p)) break;
    const double next = gradient_energy(u, mesh, p);
    last_change = std::abs(next - quotient);
    quotient = next;
  }

  out.lambda = quotient;
  out.u = std::move(u);
  return out;
}

double interpolate_linear(const std::vector<double>& xs,
                          const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return (1.0 - t) * ys[lo] + t * ys[hi];
}

}  // namespace

EigenResult principal_eigenvalue(const GridFunction& V, const RadialMesh& mesh,
                                 double p, int sign, double tol, int max_iter) {
  if (p <= 1.0) throw ContractViolation("principal_eigenvalue: requires p > 1");
  if (sign != 1 && sign != -1)
    throw ContractViolation("principal_eigenvalue: sign must be +1 or -1");
  if (V.values.size() != mesh.node_count())
    throw ContractViolation("principal_eigenvalue: V does not match the mesh");

  if (sign == -1) {
    GridFunction negV = V;
    for (double& v : negV.values) v = -v;
    EigenResult res = principal_eigenvalue(negV, mesh, p, 1, tol, max_iter);
    res.lambda = -res.lambda;
    return res;
  }

  EigenResult result;
  result.eigenfunction = make_grid_function(mesh);

  const std::vector<std::vector<double>> starts = candidate_starts(V, mesh, p);
  if (starts.empty()) {
    result.lambda = std::numeric_limits<double>::infinity();
    result.status = EigenStatus::no_sign_mass;
    return result;
  }

  const TridiagonalSystem K = stiffness(mesh);
  std::vector<DescentOutcome> outcomes;
  for (const std::vector<double>& u0 : starts)
    outcomes.push_back(run_descent(u0, V, mesh, K, p, tol, max_iter));

  const DescentOutcome* best = nullptr;
  for (const DescentOutcome& o : outcomes) {
    if (o.u.empty()) continue;
    if (!best || (o.converged && !best->converged) ||
        (o.converged == best->converged && o.lambda < best->lambda))
      best = &o;
  }
  if (!best) {
    result.lambda = std::numeric_limits<double>::infinity();
    result.status = EigenStatus::no_sign_mass;
    return result;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const DescentOutcome& o : outcomes) {
    if (!o.converged) continue;
    lo = std::min(lo, o.lambda);
    hi = std::max(hi, o.lambda);
  }
  result.multistart_spread = hi >= lo ? hi - lo : 0.0;

  std::vector<double> u = best->u;
  double umax = 0.0, umin = 0.0;
  for (double v : u) {
    umax = std::max(umax, v);
    umin = std::min(umin, v);
  }
  if (-umin > umax) {
    for (double& v : u) v = -v;
    umax = -umin;
  }
  if (umax > 0.0)
    for (double& v : u) v /= umax;

  result.lambda = best->lambda;
  result.iterations = best->iterations;
  result.kkt_residual = best->kkt;
  result.status = best->converged ? EigenStatus::converged : EigenStatus::max_iter;
  result.eigenfunction.values = std::move(u);
  enforce_mask(result.eigenfunction);

  // The quotient descent stalls once the Rayleigh value stagnates at machine
  // precision, leaving an O(sqrt(eps)) error in the eigenfunction itself. A
  // pinned Newton solve of { residual(u, lambda) = 0, u[argmax] = 1 } removes
  // it. The Newton floor depends on the flux scale of the mode, so the solve
  // may stop short of its tolerance; the polished pair is kept whenever it
  // carries a smaller eigen-residual than the descent iterate, and on any
  // failure the descent iterate stands.
  if (result.status == EigenStatus::converged) {
    OperatorConfig eig_cfg;
    eig_cfg.p = p;
    eig_cfg.dimension = mesh.dimension;
    eig_cfg.V = V;
    eig_cfg.m = make_grid_function(mesh);
    try {
      eig_cfg.lambda = result.lambda;
      const GridFunction R0 = residual(result.eigenfunction, eig_cfg, mesh);
      double descent_res = 0.0;
      for (double v : R0.values) descent_res = std::max(descent_res, std::abs(v));

      const NewtonResult polish = amplitude_pinned_solve(
          result.lambda, result.eigenfunction, 1.0, eig_cfg, mesh,
          1e-13 * (1.0 + std::abs(result.lambda)), 40);
      if (std::isfinite(polish.lambda) && polish.residual_sup < descent_res) {
        double pmax = 0.0;
        for (double v : polish.u.values) pmax = std::max(pmax, v);
        bool interior_positive = pmax > 0.0;
        for (std::size_t i = 0; interior_positive && i < mesh.node_count(); ++i)
          if (!mesh.boundary_mask[i])
            interior_positive = polish.u.values[i] > 0.0;
        if (interior_positive) {
          result.lambda = polish.lambda;
          result.eigenfunction = polish.u;
          if (pmax != 1.0)
            for (double& v : result.eigenfunction.values) v /= pmax;
        }
      }
    } catch (const NumericalError&) {
      // keep the descent result
    }
  }

  result.positive = true;
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    if (mesh.boundary_mask[i]) continue;
    if (!(result.eigenfunction.values[i] > 0.0)) {
      result.positive = false;
      break;
    }
  }
  return result;
}

double subdomain_eigenvalue(const GridFunction& V, const Interval& component,
                            const RadialMesh& mesh, double p, int sign,
                            double tol) {
  const double span = mesh.outer() - mesh.inner();
  const double eps = 1e-12 * span;
  if (component.hi - component.lo <= eps)
    throw ContractViolation("subdomain_eigenvalue: empty component");

  const bool whole = component.lo <= mesh.inner() + eps &&
                     component.hi >= mesh.outer() - eps;
  if (whole) return principal_eigenvalue(V, mesh, p, sign, tol).lambda;

  const double avg_h = span / static_cast<double>(mesh.node_count() - 1);
  const long wanted = std::lround(component.length() / avg_h) + 1;
  const int n_sub = static_cast<int>(
      std::clamp<long>(wanted, 33, static_cast<long>(mesh.node_count())));

  const bool ball_like =
      mesh.kind == DomainKind::ball && component.lo <= mesh.inner() + eps;
  const RadialMesh sub =
      ball_like
          ? build_mesh(DomainKind::ball, 0.0, component.hi, mesh.dimension,
                       n_sub)
          : build_mesh(DomainKind::annulus, component.lo, component.hi,
                       mesh.dimension, n_sub);

  GridFunction V_sub;
  V_sub.values.resize(sub.node_count());
  V_sub.dirichlet_mask.assign(sub.node_count(), 0);
  for (std::size_t i = 0; i < sub.node_count(); ++i)
    V_sub.values[i] = interpolate_linear(mesh.nodes, V.values, sub.nodes[i]);

  return principal_eigenvalue(V_sub, sub, p, sign, tol).lambda;
}

double eigenvalue_on_components(const GridFunction& V,
                                const std::vector<Interval>& components,
                                const RadialMesh& mesh, double p, int sign,
                                double tol) {
  double agg = sign > 0 ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
  for (const Interval& c : components) {
    const double lam = subdomain_eigenvalue(V, c, mesh, p, sign, tol);
    agg = sign > 0 ? std::min(agg, lam) : std::max(agg, lam);
  }
  return agg;
}

}  // namespace pbif
