#include "pbif/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "pbif/errors.hpp"
#include "pbif/numerics.hpp"

namespace pbif {

NFunction make_nfunction(std::function<double(double)> density, double check_lo,
                         double check_hi, int check_samples) {
  if (!density) throw ContractViolation("make_nfunction: empty density");
  const double at_zero = density(0.0);
  if (!(at_zero == 0.0))
    throw ConfigError("make_nfunction: density(0) = " + std::to_string(at_zero) +
                      ", expected 0");
  const std::vector<double> grid = geometric_grid(check_lo, check_hi, check_samples);
  double prev = 0.0;
  for (double t : grid) {
    const double v = density(t);
    if (!std::isfinite(v) || v < 0.0)
      throw ConfigError("make_nfunction: density not finite/nonnegative at t = " +
                        std::to_string(t));
    if (v < prev * (1.0 - 1e-12))
      throw ConfigError("make_nfunction: density decreases at sample t = " +
                        std::to_string(t));
    prev = v;
  }
  NFunction A;
  A.density = std::move(density);
  return A;
}

NFunction power_nfunction(double exponent, double coef) {
  if (!(exponent > 1.0) || !(coef > 0.0))
    throw ContractViolation("power_nfunction: need exponent > 1 and coef > 0");
  NFunction A;
  A.density = [exponent, coef](double t) {
    return coef * exponent * std::pow(t, exponent - 1.0);
  };
  A.value = [exponent, coef](double t) { return coef * std::pow(t, exponent); };
  A.inverse_density = [exponent, coef](double t) {
    return std::pow(t / (coef * exponent), 1.0 / (exponent - 1.0));
  };
  A.strictly_increasing = true;
  return A;
}

NFunction nfunction_from_table(std::vector<double> t, std::vector<double> a) {
  if (t.size() != a.size() || t.size() < 2)
    throw ConfigError("nfunction_from_table: need matching vectors with >= 2 entries");
  if (t.front() != 0.0 || a.front() != 0.0)
    throw ConfigError("nfunction_from_table: table must start at (0, 0)");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1]))
      throw ConfigError("nfunction_from_table: abscissae must increase");
    if (a[k] < a[k - 1])
      throw ConfigError("nfunction_from_table: density must be nondecreasing");
  }
  // cumulative exact integrals of the piecewise-linear density
  std::vector<double> cum(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k)
    cum[k] = cum[k - 1] + 0.5 * (a[k] + a[k - 1]) * (t[k] - t[k - 1]);
  auto ts = std::make_shared<std::vector<double>>(std::move(t));
  auto as = std::make_shared<std::vector<double>>(std::move(a));
  auto cs = std::make_shared<std::vector<double>>(std::move(cum));

  NFunction A;
  A.density = [ts, as](double x) {
    const auto& tv = *ts;
    const auto& av = *as;
    if (x <= tv.front()) return 0.0;
    if (x >= tv.back()) {
      const std::size_t k = tv.size() - 1;
      const double slope = (av[k] - av[k - 1]) / (tv[k] - tv[k - 1]);
      return av[k] + slope * (x - tv[k]);
    }
    const auto it = std::upper_bound(tv.begin(), tv.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - tv.begin());
    const double u = (x - tv[k - 1]) / (tv[k] - tv[k - 1]);
    return av[k - 1] + u * (av[k] - av[k - 1]);
  };
  auto dens = A.density;
  A.value = [ts, as, cs, dens](double x) {
    const auto& tv = *ts;
    const auto& cv = *cs;
    if (x <= tv.front()) return 0.0;
    if (x >= tv.back()) {
      const double ab = dens(x);
      return cv.back() + 0.5 * (ab + (*as).back()) * (x - tv.back());
    }
    const auto it = std::upper_bound(tv.begin(), tv.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - tv.begin());
    const double am = dens(x);
    return cv[k - 1] + 0.5 * (am + (*as)[k - 1]) * (x - tv[k - 1]);
  };
  A.strictly_increasing = false;
  return A;
}

NFunction nfunction_from_reaction(const Nonlinearity& f) {
  NFunction A = make_nfunction([f](double t) { return eval_f(f, t); });
  A.value = [f](double t) { return eval_F(f, t); };
  A.strictly_increasing = true;
  return A;
}

double nf_value(const NFunction& A, double t) {
  if (t < 0.0) throw ContractViolation("nf_value: negative argument");
  if (t == 0.0) return 0.0;
  if (A.value) return A.value(t);
  return adaptive_simpson(A.density, 0.0, t, 1e-11);
}

double nf_density(const NFunction& A, double t) {
  if (t < 0.0) throw ContractViolation("nf_density: negative argument");
  return A.density(t);
}

NFunction conjugate(const NFunction& A) {
  if (!A.density) throw ContractViolation("conjugate: empty density");
  NFunction C;
  if (A.inverse_density) {
    C.density = A.inverse_density;
  } else {
    auto a = A.density;
    C.density = [a](double t) {
      if (t <= 0.0) return 0.0;
      return invert_nondecreasing(a, t, 0.0, 1.0);
    };
  }
  // Young's equality A*(t) = t s - A(s) at s = a*(t); exact for the
  // right-continuous conjugate density, and it avoids nested quadrature.
  NFunction base = A;
  auto cdens = C.density;
  C.value = [base, cdens](double t) {
    if (t <= 0.0) return 0.0;
    const double s = cdens(t);
    return t * s - nf_value(base, s);
  };
  if (A.strictly_increasing) C.inverse_density = A.density;
  C.strictly_increasing = A.strictly_increasing;
  return C;
}

double gauge_norm(const GridFunction& u, const NFunction& A,
                  const RadialMesh& mesh) {
  if (u.values.size() != mesh.node_count())
    throw ContractViolation("gauge_norm: grid function does not match mesh");
  const double amp = sup_norm(u);
  if (amp == 0.0) return 0.0;

  auto modular = [&](double k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      if (mesh.node_weight[i] == 0.0) continue;
      acc += mesh.node_weight[i] * nf_value(A, std::abs(u.values[i]) / k);
      if (!std::isfinite(acc)) return std::numeric_limits<double>::infinity();
    }
    return acc;
  };

  // Bracket: scale so the largest argument sits at A^{-1}(1), then expand by
  // doubling until the modular straddles 1.
  const double t1 = invert_nondecreasing(
      [&](double t) { return nf_value(A, t); }, 1.0, 0.0, 1.0);
  double hi = (t1 > 0.0) ? amp / t1 : amp;
  if (!(hi > 0.0)) hi = amp;
  int guard = 0;
  while (modular(hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 400) throw NumericalError("gauge_norm: no upper bracket");
  }
  double lo = hi;
  while (modular(lo) <= 1.0) {
    lo *= 0.5;
    if (++guard > 800) {
      lo = 0.0;  // modular stays <= 1 arbitrarily close to zero
      break;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (modular(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

Delta2Result check_delta2(const NFunction& A, const std::vector<double>& t_grid) {
  if (t_grid.size() < 8)
    throw ContractViolation("check_delta2: grid too short for a tail verdict");
  Delta2Result res;
  std::vector<double> rho(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    const double a = nf_density(A, t);
    const double v = nf_value(A, t);
    if (!(v > 0.0) || !std::isfinite(a)) {
      res.satisfied = false;
      res.tail_diverging = true;
      res.witness_t = t;
      res.k0 = std::numeric_limits<double>::infinity();
      return res;
    }
    rho[k] = t * a / v;
    if (rho[k] > res.k0) {
      res.k0 = rho[k];
      res.witness_t = t;
    }
  }
  const std::size_t tail = t_grid.size() - t_grid.size() / 4;
  res.tail_diverging = rho.back() > rho[tail - 1] * 1.02;
  res.satisfied = !res.tail_diverging;
  return res;
}

bool check_essentially_slower(const NFunction& B, const NFunction& A,
                              const std::vector<double>& delta_grid,
                              const std::vector<double>& t_grid,
                              double abs_tol) {
  if (t_grid.size() < 8)
    throw ContractViolation("check_essentially_slower: grid too short");
  for (double delta : delta_grid) {
    if (!(delta > 1.0))
      throw ContractViolation("check_essentially_slower: delta must be > 1");
    std::vector<double> rho(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      const double den = nf_value(A, t_grid[k]);
      if (!(den > 0.0)) return false;
      rho[k] = nf_value(B, delta * t_grid[k]) / den;
      if (!std::isfinite(rho[k])) return false;
    }
    const std::size_t tail = t_grid.size() / 2;
    for (std::size_t k = tail; k + 1 < rho.size(); ++k)
      if (rho[k + 1] > rho[k] * (1.0 + 1e-9)) return false;
    const bool below = rho.back() <= abs_tol;
    const bool decaying = rho.back() <= 0.99 * rho[tail];
    if (!below && !decaying) return false;
  }
  return true;
}

double young_gap(double s, double t, const NFunction& A) {
  if (s < 0.0 || t < 0.0) throw ContractViolation("young_gap: negative arguments");
  const NFunction C = conjugate(A);
  return nf_value(A, s) + nf_value(C, t) - s * t;
}

HolderResult holder_check(const GridFunction& u, const GridFunction& v,
                          const NFunction& A, const RadialMesh& mesh) {
  if (u.values.size() != mesh.node_count() || v.values.size() != mesh.node_count())
    throw ContractViolation("holder_check: grid functions do not match mesh");
  HolderResult res;
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    acc += mesh.node_weight[i] * u.values[i] * v.values[i];
  res.lhs = std::abs(acc);
  const NFunction C = conjugate(A);
  res.rhs = 2.0 * gauge_norm(u, A, mesh) * gauge_norm(v, C, mesh);
  res.ok = res.lhs <= res.rhs * (1.0 + 1e-10) + 1e-12;
  return res;
}

CompactnessReport compactness_hypotheses(const Nonlinearity& f, double p,
                                         int dimension) {
  if (!(p > 1.0) || dimension <= p)
    throw ContractViolation("compactness_hypotheses: need 1 < p < dimension");
  const double p_star = dimension * p / (dimension - p);
  if (std::abs(p_star - f.p_star) > 1e-9 * p_star)
    throw ContractViolation(
        "compactness_hypotheses: nonlinearity growth exponent does not match (p, dimension)");

  CompactnessReport rep;

  const NFunction Fbar = nfunction_from_reaction(f);  // throws if f not monotone
  const NFunction A = conjugate(Fbar);

  // Doubling of A past f(s0), sampled at t = f(s) so the grid tracks the
  // conjugate's natural parameterization.
  {
    const std::vector<double> s =
        geometric_grid(std::max(f.s0, 1e-6), 1e8, 160);
    std::vector<double> t(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) t[k] = eval_f(f, s[k]);
    rep.delta2 = check_delta2(A, t);
  }

  // Certified superlinearity constant, reused for the doubling bound.
  {
    const std::vector<double> s =
        geometric_grid(std::max(f.s0, 1e-6), 1e8, 160);
    double F = eval_F(f, s.front());
    double cert = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k > 0)
        F += adaptive_simpson([&](double x) { return eval_f(f, x); }, s[k - 1],
                              s[k], 1e-10);
      if (F > 0.0) cert = std::min(cert, s[k] * eval_f(f, s[k]) / F);
    }
    rep.certified_c0 = cert;
    rep.k0_bound = (cert > 1.0) ? cert / (cert - 1.0)
                                : std::numeric_limits<double>::infinity();
    rep.k0_within_bound = rep.delta2.k0 <= rep.k0_bound + 0.1;
  }

  // Primitive of f grows essentially more slowly than t^{p*}.
  {
    const NFunction ceiling = power_nfunction(f.p_star, 1.0);
    rep.essentially_slower = check_essentially_slower(
        Fbar, ceiling, {1.25, 2.0, 4.0}, geometric_grid(1.0, 1e8, 120));
  }

  rep.pass = rep.delta2.satisfied && rep.essentially_slower && rep.k0_within_bound;
  return rep;
}

}  // namespace pbif
