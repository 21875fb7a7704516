#include "pbif/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "pbif/errors.hpp"

namespace pbif {

namespace {

double residual_sup(const GridFunction& R) {
  double m = 0.0;
  for (double v : R.values) m = std::max(m, std::abs(v));
  return m;
}

std::size_t free_count(const RadialMesh& mesh) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    if (!mesh.boundary_mask[i]) ++n;
  return n;
}

// Scaled inner product over free nodes: (1/n_free) sum a_i b_i. Keeps the
// arclength metric mesh-size independent so step sizes transfer across
// refinements.
double wdot(const std::vector<double>& a, const std::vector<double>& b,
            const RadialMesh& mesh, std::size_t n_free) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    if (!mesh.boundary_mask[i]) acc += a[i] * b[i];
  return acc / static_cast<double>(n_free);
}

double effective_p_star(const OperatorConfig& cfg, const RadialMesh& mesh) {
  if (cfg.f) return cfg.f->p_star;
  const double n = static_cast<double>(mesh.dimension);
  if (n > cfg.p) return n * cfg.p / (n - cfg.p);
  return std::numeric_limits<double>::quiet_NaN();
}

BranchPoint make_branch_point(double lambda, GridFunction u,
                              const OperatorConfig& cfg,
                              const RadialMesh& mesh) {
  OperatorConfig at = cfg;
  at.lambda = lambda;
  BranchPoint bp;
  bp.lambda = lambda;
  bp.residual_norm = residual_sup(residual(u, at, mesh));
  bp.sup_norm = sup_norm(u);
  const double ps = effective_p_star(cfg, mesh);
  bp.lp_star_norm = std::isfinite(ps)
                        ? lebesgue_norm(u, mesh, ps)
                        : std::numeric_limits<double>::quiet_NaN();
  bp.sobolev_norm = sobolev_seminorm(u, mesh, cfg.p);
  bp.u = std::move(u);
  return bp;
}

bool interior_positive(const GridFunction& u, const RadialMesh& mesh) {
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    if (mesh.boundary_mask[i]) continue;
    if (!(u.values[i] > 0.0)) return false;
  }
  return true;
}

// Solves the bordered system
//   [ J    Rlam ] [du  ]   [ rhs1 ]
//   [ cu^T clam ] [dlam] = [ rhs2 ]
// by block elimination through the tridiagonal factor plus one pass of
// iterative refinement (J is nearly singular close to a bifurcation point,
// where the border keeps the full system well conditioned).
struct BorderedStep {
  std::vector<double> du;
  double dlam = 0.0;
};

BorderedStep solve_bordered(const TridiagonalSystem& J,
                            const std::vector<double>& Rlam,
                            const std::vector<double>& cu, double clam,
                            const std::vector<double>& rhs1, double rhs2) {
  const std::size_t n = rhs1.size();
  std::vector<double> neg_rlam(n);
  for (std::size_t i = 0; i < n; ++i) neg_rlam[i] = -Rlam[i];
  const std::vector<double> b = solve_tridiagonal(J, neg_rlam);

  double cu_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) cu_b += cu[i] * b[i];
  const double denom = clam + cu_b;
  if (!std::isfinite(denom) || denom == 0.0)
    throw NumericalError("bordered solve: singular border");

  auto one_pass = [&](const std::vector<double>& r1, double r2) {
    std::vector<double> a = solve_tridiagonal(J, r1);
    double cu_a = 0.0;
    for (std::size_t i = 0; i < n; ++i) cu_a += cu[i] * a[i];
    const double dlam = (r2 - cu_a) / denom;
    for (std::size_t i = 0; i < n; ++i) a[i] += dlam * b[i];
    return BorderedStep{std::move(a), dlam};
  };

  BorderedStep s = one_pass(rhs1, rhs2);

  // refinement: recompute the linear residual and correct once
  std::vector<double> jd = tridiagonal_apply(J, s.du);
  std::vector<double> r1(n);
  double r2 = rhs2 - clam * s.dlam;
  for (std::size_t i = 0; i < n; ++i) {
    r1[i] = rhs1[i] - jd[i] - Rlam[i] * s.dlam;
    r2 -= cu[i] * s.du[i];
  }
  const BorderedStep e = one_pass(r1, r2);
  for (std::size_t i = 0; i < n; ++i) s.du[i] += e.du[i];
  s.dlam += e.dlam;
  return s;
}

}  // namespace

NewtonResult newton_solve(double lambda, const GridFunction& u0,
                          const OperatorConfig& cfg0, const RadialMesh& mesh,
                          double tol, int max_iter) {
  OperatorConfig cfg = cfg0;
  cfg.lambda = lambda;

  NewtonResult res;
  res.lambda = lambda;
  GridFunction u = u0;
  enforce_mask(u);

  GridFunction R = residual(u, cfg, mesh);
  double rn = residual_sup(R);
  for (int it = 0; it < max_iter && rn > tol; ++it) {
    res.iterations = it + 1;
    std::vector<double> delta;
    try {
      const TridiagonalSystem J = jacobian(u, cfg, mesh);
      std::vector<double> rhs(R.values.size());
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -R.values[i];
      delta = solve_tridiagonal(J, rhs);
    } catch (const NumericalError&) {
      break;  // linearization breakdown: report the last iterate
    }

    double t = 1.0;
    bool accepted = false;
    GridFunction trial = u;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < u.values.size(); ++i)
        trial.values[i] = u.values[i] + t * delta[i];
      enforce_mask(trial);
      GridFunction Rt = residual(trial, cfg, mesh);
      const double rt = residual_sup(Rt);
      if (rt <= (1.0 - 1e-4 * t) * rn || rt <= tol) {
        u = trial;
        R = std::move(Rt);
        rn = rt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }

  res.u = std::move(u);
  res.residual_sup = rn;
  res.converged = rn <= tol;
  return res;
}

NewtonResult amplitude_pinned_solve(double lambda0, const GridFunction& u0,
                                    double amplitude,
                                    const OperatorConfig& cfg0,
                                    const RadialMesh& mesh, double tol,
                                    int max_iter) {
  if (!(amplitude > 0.0))
    throw ContractViolation("amplitude_pinned_solve: amplitude must be > 0");

  const std::size_t n = mesh.node_count();
  std::size_t pin = n;
  double pin_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (mesh.boundary_mask[i]) continue;
    if (u0.values[i] > pin_val) {
      pin_val = u0.values[i];
      pin = i;
    }
  }
  if (pin == n)
    throw ContractViolation("amplitude_pinned_solve: no free node to pin");

  OperatorConfig cfg = cfg0;
  double lambda = lambda0;
  GridFunction u = u0;
  enforce_mask(u);

  std::vector<double> cu(n, 0.0);
  cu[pin] = 1.0;

  NewtonResult res;
  auto merit = [&](const GridFunction& v, double lam) {
    cfg.lambda = lam;
    const double rn = residual_sup(residual(v, cfg, mesh));
    return std::max(rn, std::abs(v.values[pin] - amplitude));
  };

  // Always take at least one correction step: the input is a predictor, and
  // accepting it untouched would return a point whose lambda and shape carry
  // the predictor's bias even when its merit already sits below tol.
  double err = merit(u, lambda);
  for (int it = 0; it < max_iter && (it == 0 || err > tol); ++it) {
    res.iterations = it + 1;
    cfg.lambda = lambda;
    BorderedStep step;
    try {
      const GridFunction R = residual(u, cfg, mesh);
      const TridiagonalSystem J = jacobian(u, cfg, mesh);
      const std::vector<double> Rlam = lambda_derivative(u, cfg, mesh);
      std::vector<double> rhs1(n);
      for (std::size_t i = 0; i < n; ++i) rhs1[i] = -R.values[i];
      step = solve_bordered(J, Rlam, cu, 0.0, rhs1,
                            amplitude - u.values[pin]);
    } catch (const NumericalError&) {
      break;
    }

    double t = 1.0;
    bool accepted = false;
    GridFunction trial = u;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < n; ++i)
        trial.values[i] = u.values[i] + t * step.du[i];
      enforce_mask(trial);
      const double lt = lambda + t * step.dlam;
      const double et = merit(trial, lt);
      if (et <= (1.0 - 1e-4 * t) * err || et <= tol) {
        u = trial;
        lambda = lt;
        err = et;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }

  res.u = std::move(u);
  res.lambda = lambda;
  res.residual_sup = err;
  res.converged = err <= tol;
  return res;
}

PredictorGuess bifurcation_predictor(const EigenResult& e, double epsilon,
                                     BifurcationSide side,
                                     double lambda_offset_rel) {
  if (epsilon < 0.0)
    throw ContractViolation("bifurcation_predictor: epsilon must be >= 0");
  PredictorGuess g;
  g.u = e.eigenfunction;
  for (double& v : g.u.values) v *= epsilon;
  if (epsilon == 0.0) {
    g.lambda = e.lambda;
    return g;
  }
  const double off = lambda_offset_rel * std::abs(e.lambda);
  g.lambda = e.lambda + (side == BifurcationSide::right ? off : -off);
  return g;
}

std::vector<BranchPoint> seed_branch(const EigenResult& e, BifurcationSide side,
                                     const std::vector<double>& amplitudes,
                                     const OperatorConfig& cfg,
                                     const RadialMesh& mesh, double tol) {
  if (e.status != EigenStatus::converged)
    throw ContractViolation("seed_branch: eigenpair did not converge");
  if (amplitudes.empty())
    throw ContractViolation("seed_branch: no amplitudes given");

  std::vector<BranchPoint> points;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const double eps = amplitudes[k];
    if (!(eps > 0.0) || (k > 0 && eps <= amplitudes[k - 1]))
      throw ContractViolation("seed_branch: amplitudes must be positive and ascending");

    GridFunction u0;
    double lambda0;
    if (k == 0) {
      const PredictorGuess g = bifurcation_predictor(e, eps, side);
      u0 = g.u;
      lambda0 = g.lambda;
    } else {
      u0 = points[k - 1].u;
      const double scale = eps / amplitudes[k - 1];
      for (double& v : u0.values) v *= scale;
      lambda0 = points[k - 1].lambda;
      if (k >= 2) {
        const double de = amplitudes[k - 1] - amplitudes[k - 2];
        if (de > 0.0)
          lambda0 += (points[k - 1].lambda - points[k - 2].lambda) *
                     (eps - amplitudes[k - 1]) / de;
      }
    }

    const NewtonResult r =
        amplitude_pinned_solve(lambda0, u0, eps, cfg, mesh, tol);
    if (!r.converged)
      throw NumericalError("seed_branch: corrector failed at amplitude " +
                           std::to_string(eps));
    if (!interior_positive(r.u, mesh))
      throw NumericalError("seed_branch: seed lost positivity at amplitude " +
                           std::to_string(eps));
    points.push_back(make_branch_point(r.lambda, r.u, cfg, mesh));
  }

  // record the seed secant direction so diagrams start with a meaningful slope
  const std::size_t n_free = free_count(mesh);
  for (std::size_t k = 1; k < points.size(); ++k) {
    std::vector<double> du(points[k].u.values);
    for (std::size_t i = 0; i < du.size(); ++i)
      du[i] -= points[k - 1].u.values[i];
    const double dl = points[k].lambda - points[k - 1].lambda;
    const double nrm = std::sqrt(wdot(du, du, mesh, n_free) + dl * dl);
    points[k].tangent_dlambda = nrm > 0.0 ? dl / nrm : 0.0;
  }
  if (points.size() > 1) points[0].tangent_dlambda = points[1].tangent_dlambda;
  return points;
}

Branch trace_branch(const BranchPoint& start, const OperatorConfig& cfg0,
                    const RadialMesh& mesh, BranchOrigin origin,
                    const TraceOptions& opts) {
  if (!(opts.step0 > 0.0) || !(opts.min_step > 0.0) ||
      !(opts.max_step >= opts.step0) || !(opts.newton_tol > 0.0))
    throw ContractViolation("trace_branch: invalid step control");

  const std::size_t n = mesh.node_count();
  const std::size_t n_free = free_count(mesh);

  Branch br;
  br.origin = origin;
  br.points.push_back(start);

  // initial tangent: supplied direction, or radially the start profile itself
  std::vector<double> tu = opts.tangent_u;
  double tl = opts.tangent_lambda;
  if (tu.empty()) {
    tu = start.u.values;
  }
  if (tu.size() != n)
    throw ContractViolation("trace_branch: tangent length does not match mesh");
  {
    const double nrm = std::sqrt(wdot(tu, tu, mesh, n_free) + tl * tl);
    if (!(nrm > 0.0))
      throw ContractViolation("trace_branch: zero initial tangent");
    for (double& v : tu) v /= nrm;
    tl /= nrm;
  }

  const bool reconnect_on = std::isfinite(opts.reconnect_lambda) &&
                            std::isfinite(opts.reconnect_lambda_tol);

  OperatorConfig cfg = cfg0;
  double h = opts.step0;
  br.termination = BranchTermination::step_failure;
  br.diagnostic = "max_points reached";

  while (br.points.size() < static_cast<std::size_t>(opts.max_points)) {
    const BranchPoint& P = br.points.back();

    // predictor
    GridFunction u = P.u;
    for (std::size_t i = 0; i < n; ++i) u.values[i] += h * tu[i];
    enforce_mask(u);
    double lambda = P.lambda + h * tl;

    // corrector on { residual = 0, arclength constraint = 0 }
    std::vector<double> cu(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (!mesh.boundary_mask[i])
        cu[i] = tu[i] / static_cast<double>(n_free);

    auto merit = [&](const GridFunction& v, double lam) {
      cfg.lambda = lam;
      const double rn = residual_sup(residual(v, cfg, mesh));
      std::vector<double> dv(n);
      for (std::size_t i = 0; i < n; ++i) dv[i] = v.values[i] - P.u.values[i];
      const double c =
          wdot(tu, dv, mesh, n_free) + tl * (lam - P.lambda) - h;
      return std::max(rn, std::abs(c));
    };

    bool converged = false;
    int iters = 0;
    double err = merit(u, lambda);
    try {
      for (; iters < opts.newton_max_iter; ++iters) {
        if (err <= opts.newton_tol) {
          converged = true;
          break;
        }
        cfg.lambda = lambda;
        const GridFunction R = residual(u, cfg, mesh);
        const TridiagonalSystem J = jacobian(u, cfg, mesh);
        const std::vector<double> Rlam = lambda_derivative(u, cfg, mesh);
        std::vector<double> rhs1(n);
        for (std::size_t i = 0; i < n; ++i) rhs1[i] = -R.values[i];
        std::vector<double> dv(n);
        for (std::size_t i = 0; i < n; ++i) dv[i] = u.values[i] - P.u.values[i];
        const double c =
            wdot(tu, dv, mesh, n_free) + tl * (lambda - P.lambda) - h;
        const BorderedStep step = solve_bordered(J, Rlam, cu, tl, rhs1, -c);

        double t = 1.0;
        bool accepted = false;
        GridFunction trial = u;
        for (int ls = 0; ls < 30; ++ls) {
          for (std::size_t i = 0; i < n; ++i)
            trial.values[i] = u.values[i] + t * step.du[i];
          enforce_mask(trial);
          const double lt = lambda + t * step.dlam;
          const double et = merit(trial, lt);
          if (et <= (1.0 - 1e-4 * t) * err || et <= opts.newton_tol) {
            u = trial;
            lambda = lt;
            err = et;
            accepted = true;
            break;
          }
          t *= 0.5;
        }
        if (!accepted) break;
      }
      if (!converged && err <= opts.newton_tol) converged = true;
    } catch (const NumericalError&) {
      converged = false;
    }

    if (!converged) {
      h *= 0.5;
      if (h < opts.min_step) {
        br.termination = BranchTermination::step_failure;
        br.diagnostic = "corrector failed at the minimum arclength step";
        break;
      }
      continue;
    }

    BranchPoint np = make_branch_point(lambda, std::move(u), cfg0, mesh);

    // secant tangent, oriented along the direction of travel
    std::vector<double> su(n);
    for (std::size_t i = 0; i < n; ++i)
      su[i] = np.u.values[i] - P.u.values[i];
    const double sl = np.lambda - P.lambda;
    const double snrm = std::sqrt(wdot(su, su, mesh, n_free) + sl * sl);
    if (snrm > 0.0) {
      for (double& v : su) v /= snrm;
      double new_tl = sl / snrm;
      if (wdot(su, tu, mesh, n_free) + new_tl * tl < 0.0) {
        for (double& v : su) v = -v;
        new_tl = -new_tl;
      }
      np.tangent_dlambda = new_tl;
      tu = std::move(su);
      tl = new_tl;
    } else {
      np.tangent_dlambda = tl;
    }

    if (reconnect_on && np.sup_norm < opts.reconnect_norm_tol &&
        std::abs(np.lambda - opts.reconnect_lambda) <
            opts.reconnect_lambda_tol) {
      if (interior_positive(np.u, mesh)) br.points.push_back(std::move(np));
      br.termination = BranchTermination::reconnected;
      br.diagnostic.clear();
      break;
    }
    if (!interior_positive(np.u, mesh)) {
      br.termination = BranchTermination::positivity_lost;
      br.diagnostic =
          "corrector left the positive cone; branch truncated before the "
          "sign-changing point";
      break;
    }
    if (np.sup_norm > opts.norm_cap) {
      br.points.push_back(std::move(np));
      br.termination = BranchTermination::norm_cap;
      br.diagnostic =
          "sup-norm cap reached; not evidence of an unbounded branch";
      break;
    }
    if (np.lambda < opts.lambda_lo || np.lambda > opts.lambda_hi) {
      br.points.push_back(std::move(np));
      br.termination = BranchTermination::lambda_cap;
      br.diagnostic.clear();
      break;
    }

    br.points.push_back(std::move(np));

    if (iters <= 4)
      h = std::min(h * 1.5, opts.max_step);
    else if (iters >= 12)
      h = std::max(h * 0.5, opts.min_step);
  }

  return br;
}

std::vector<std::size_t> detect_folds(Branch& b) {
  if (b.points.size() < 3)
    throw ContractViolation("detect_folds: need at least 3 points");
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
    if (b.points[k].tangent_dlambda * b.points[k + 1].tangent_dlambda < 0.0) {
      idx.push_back(k);
      b.points[k].is_fold = true;
    }
  }
  return idx;
}

}  // namespace pbif
