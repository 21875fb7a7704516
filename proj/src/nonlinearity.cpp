#include "pbif/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pbif/errors.hpp"
#include "pbif/numerics.hpp"

namespace pbif {

namespace {

void check_common(double p_star) {
  if (!(p_star > 1.0))
    throw ContractViolation("Nonlinearity: p_star must be > 1");
}

double table_eval(const Nonlinearity& f, double s) {
  const auto& xs = f.table_s;
  const auto& ys = f.table_f;
  if (s <= xs.front()) return ys.front();
  if (s >= xs.back()) {
    // extend by the last log-log slope when it exists, linearly otherwise
    const std::size_t k = xs.size() - 1;
    if (xs[k - 1] > 0.0 && ys[k] > 0.0 && ys[k - 1] > 0.0) {
      const double slope = std::log(ys[k] / ys[k - 1]) / std::log(xs[k] / xs[k - 1]);
      return ys[k] * std::pow(s / xs[k], slope);
    }
    const double t = (s - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + t * (ys[k] - ys[k - 1]);
  }
  const auto it = std::upper_bound(xs.begin(), xs.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  const double t = (s - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return ys[k - 1] + t * (ys[k] - ys[k - 1]);
}

}  // namespace

Nonlinearity make_log_damped(double p_star, double beta, double s0, double c0) {
  check_common(p_star);
  Nonlinearity f;
  f.kind = FKind::log_damped_power;
  f.p_star = p_star;
  f.beta = beta;
  f.s0 = s0;
  f.c0 = c0;
  return f;
}

Nonlinearity make_iterated_log(double p_star, double beta, double s0, double c0) {
  check_common(p_star);
  Nonlinearity f;
  f.kind = FKind::iterated_log_power;
  f.p_star = p_star;
  f.beta = beta;
  f.s0 = s0;
  f.c0 = c0;
  return f;
}

Nonlinearity make_pure_power(double p_star, double q, double s0, double c0) {
  check_common(p_star);
  if (!(q > 1.0) || q > p_star + 1e-12)
    throw ContractViolation("make_pure_power: need 1 < q <= p_star");
  Nonlinearity f;
  f.kind = FKind::pure_power;
  f.p_star = p_star;
  f.q = q;
  f.s0 = s0;
  f.c0 = c0;
  return f;
}

Nonlinearity make_custom(std::vector<double> s, std::vector<double> fv,
                         double p_star, double s0, double c0) {
  check_common(p_star);
  if (s.size() != fv.size() || s.size() < 2)
    throw ConfigError("make_custom: need matching sample vectors with >= 2 entries");
  if (s.front() != 0.0 || fv.front() != 0.0)
    throw ConfigError("make_custom: table must start at (0, 0)");
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!(s[k] > s[k - 1]))
      throw ConfigError("make_custom: sample abscissae must be strictly increasing");
  Nonlinearity f;
  f.kind = FKind::custom;
  f.p_star = p_star;
  f.s0 = s0;
  f.c0 = c0;
  f.table_s = std::move(s);
  f.table_f = std::move(fv);
  return f;
}

double eval_f(const Nonlinearity& f, double s) {
  if (s < 0.0)
    throw ContractViolation(
        "eval_f: negative argument; apply the odd extension at the call site");
  if (s == 0.0) return 0.0;
  switch (f.kind) {
    case FKind::log_damped_power:
      return std::pow(s, f.p_star - 1.0) /
             std::pow(std::log(std::numbers::e + s), f.beta);
    case FKind::iterated_log_power:
      return std::pow(s, f.p_star - 1.0) /
             std::pow(std::log(std::numbers::e + std::log1p(s)), f.beta);
    case FKind::pure_power:
      return std::pow(s, f.q - 1.0);
    case FKind::custom:
      return table_eval(f, s);
  }
  throw ContractViolation("eval_f: unknown kind");
}

double eval_f_prime(const Nonlinearity& f, double s) {
  if (s < 0.0) return eval_f_prime(f, -s);  // derivative of the odd extension
  switch (f.kind) {
    case FKind::log_damped_power: {
      if (s == 0.0) return f.p_star > 2.0 ? 0.0 : eval_f_prime(f, 1e-300);
      const double a = f.p_star - 1.0;
      const double L = std::log(std::numbers::e + s);
      return std::pow(s, a - 1.0) * std::pow(L, -f.beta - 1.0) *
             (a * L - f.beta * s / (std::numbers::e + s));
    }
    case FKind::iterated_log_power: {
      if (s == 0.0) return f.p_star > 2.0 ? 0.0 : eval_f_prime(f, 1e-300);
      const double a = f.p_star - 1.0;
      const double M = std::log(std::numbers::e + std::log1p(s));
      const double Mp = 1.0 / ((1.0 + s) * (std::numbers::e + std::log1p(s)));
      return std::pow(s, a - 1.0) * std::pow(M, -f.beta - 1.0) *
             (a * M - f.beta * s * Mp);
    }
    case FKind::pure_power:
      if (s == 0.0) return f.q > 2.0 ? 0.0 : (f.q == 2.0 ? 1.0 : std::numeric_limits<double>::infinity());
      return (f.q - 1.0) * std::pow(s, f.q - 2.0);
    case FKind::custom: {
      const double h = 1e-6 * (1.0 + s);
      return (eval_f(f, s + h) - eval_f(f, std::max(0.0, s - h))) /
             (h + std::min(s, h));
    }
  }
  throw ContractViolation("eval_f_prime: unknown kind");
}

double eval_F(const Nonlinearity& f, double s) {
  if (s == 0.0) return 0.0;
  if (s < 0.0) return eval_F(f, -s);  // even primitive of the odd extension
  if (f.kind == FKind::pure_power) return std::pow(s, f.q) / f.q;
  return adaptive_simpson([&](double t) { return eval_f(f, t); }, 0.0, s,
                          1e-10);
}

double compute_g0(const Nonlinearity& f, double tau) {
  if (!(tau > 0.0)) throw ContractViolation("compute_g0: tau must be > 0");
  // Ratios at s, s/2, s/4, ...; the prototypes approach the limit with an
  // O(s) leading error, so two Richardson sweeps with ratio 2 leave O(s^3).
  const int levels = 24;
  std::vector<double> r(levels);
  double s = 1e-2;
  for (int k = 0; k < levels; ++k) {
    const double den = eval_f(f, s);
    if (den == 0.0 || !std::isfinite(den))
      throw NumericalError("compute_g0: f vanished on the sample grid");
    r[k] = eval_f(f, tau * s) / den;
    s *= 0.5;
  }
  std::vector<double> r1(levels - 1), r2(levels - 2);
  for (int k = 0; k + 1 < levels; ++k) r1[k] = 2.0 * r[k + 1] - r[k];
  for (int k = 0; k + 2 < levels; ++k) r2[k] = (4.0 * r1[k + 1] - r1[k]) / 3.0;
  for (int k = static_cast<int>(r2.size()); k-- > 1;) {
    const double a = r2[k - 1], b = r2[k];
    if (std::abs(a - b) <= 1e-9 * (std::abs(b) + 1.0)) return b;
  }
  throw NumericalError("compute_g0: extrapolation did not settle at tau = " +
                       std::to_string(tau));
}

double g0_exponent(const Nonlinearity& f) {
  const double e2 = std::log(compute_g0(f, 2.0)) / std::log(2.0);
  const double e3 = std::log(compute_g0(f, 3.0)) / std::log(3.0);
  return 0.5 * (e2 + e3);
}

double compute_C0(const Nonlinearity& f, double p) {
  if (!(p > 1.0)) throw ContractViolation("compute_C0: p must be > 1");
  const std::vector<double> grid = geometric_grid(1e-8, 1e8, 400);
  auto ratio = [&](double s) { return -eval_f(f, s) / std::pow(s, p - 1.0); };
  double best = 0.0, best_s = grid.front();
  for (double s : grid) {
    const double v = ratio(s);
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  if (best == 0.0) return 0.0;
  // still growing at either grid end: treat the sup as unbounded
  if (best_s == grid.front() && ratio(grid.front()) > ratio(grid[1]) &&
      ratio(grid.front()) > 1e6)
    return std::numeric_limits<double>::infinity();
  if (best_s == grid.back() && ratio(grid.back()) > ratio(grid[grid.size() - 2]) &&
      ratio(grid.back()) > 1e6)
    return std::numeric_limits<double>::infinity();
  // golden-section polish around the best sample
  double lo = best_s / 10.0, hi = best_s * 10.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = ratio(x1), f2 = ratio(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = ratio(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = ratio(x1);
    }
  }
  return std::max({best, f1, f2, 0.0});
}

double h_of(const Nonlinearity& f, double s, double lambda_bound, double V_sup,
            double p, double delta) {
  if (s < 0.0) throw ContractViolation("h_of: s must be >= 0");
  if (s == 0.0) return 0.0;
  const double den =
      (lambda_bound + delta) * V_sup * std::pow(s, p - 1.0) + eval_f(f, s);
  if (!(den > 0.0))
    throw NumericalError("h_of: nonpositive denominator at s = " + std::to_string(s));
  return std::pow(s, f.p_star - 1.0) / den;
}

namespace {

// Desk-scale verdict for "this positive ratio tends to 0": the tail must be
// monotone nonincreasing and either already below tail_tol or still decaying
// with no plateau (a flat tail such as the critical pure power fails).
LimitVerdict limit_is_zero(const std::vector<double>& s,
                           const std::vector<double>& rho, double tail_tol,
                           double plateau_factor) {
  LimitVerdict v;
  const std::size_t n = rho.size();
  const std::size_t tail = n / 2;
  v.last_value = rho.back();
  v.witness_s = s.back();
  for (std::size_t k = tail; k + 1 < n; ++k) {
    if (rho[k + 1] > rho[k] * (1.0 + 1e-12) + 1e-300) {
      v.pass = false;
      v.witness_s = s[k + 1];
      v.note = "tail not monotone";
      return v;
    }
  }
  if (rho.back() <= tail_tol) {
    v.pass = true;
    v.note = "below tolerance";
    return v;
  }
  if (rho.back() <= plateau_factor * rho[tail]) {
    v.pass = true;
    v.note = "monotone decay, no plateau";
    return v;
  }
  v.pass = false;
  v.note = "tail plateaued above tolerance";
  return v;
}

}  // namespace

HypothesisReport check_hypotheses(const Nonlinearity& f, double p,
                                  const SampleControl& ctrl) {
  if (!(p > 1.0)) throw ContractViolation("check_hypotheses: p must be > 1");
  HypothesisReport rep;

  // (f1): subcriticality at infinity.
  {
    const std::vector<double> s =
        geometric_grid(ctrl.s_large_lo, ctrl.s_large_hi, ctrl.samples);
    std::vector<double> rho(s.size());
    for (std::size_t k = 0; k < s.size(); ++k)
      rho[k] = eval_f(f, s[k]) / std::pow(s[k], f.p_star - 1.0);
    rep.f1 = limit_is_zero(s, rho, ctrl.tail_tol, ctrl.plateau_factor);
  }

  // (f2): uniform superlinearity of the primitive beyond s0.
  {
    const std::vector<double> s =
        geometric_grid(std::max(f.s0, 1e-12), ctrl.s_large_hi, ctrl.samples);
    double cert = std::numeric_limits<double>::infinity();
    rep.f2_monotone = true;
    double F = eval_F(f, s.front());
    double prev_f = eval_f(f, s.front());
    rep.f2_witness_s = s.front();
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k > 0) {
        F += adaptive_simpson([&](double t) { return eval_f(f, t); }, s[k - 1],
                              s[k], 1e-10);
        const double fk = eval_f(f, s[k]);
        if (fk < prev_f * (1.0 - 1e-12)) rep.f2_monotone = false;
        prev_f = fk;
      }
      if (F > 0.0) {
        const double ratio = s[k] * eval_f(f, s[k]) / F;
        if (ratio < cert) {
          cert = ratio;
          rep.f2_witness_s = s[k];
        }
      }
    }
    rep.f2_certified_c0 = cert;
    rep.f2 = rep.f2_monotone && std::isfinite(cert) && cert > 1.0 + 1e-9 &&
             cert >= f.c0 - 1e-12;
  }

  // (f3): p-sublinearity at zero.
  {
    std::vector<double> s =
        geometric_grid(ctrl.s_small_lo, ctrl.s_small_hi, ctrl.samples);
    std::reverse(s.begin(), s.end());  // tail of the sequence is s -> 0
    std::vector<double> rho(s.size());
    for (std::size_t k = 0; k < s.size(); ++k)
      rho[k] = eval_f(f, s[k]) / std::pow(s[k], p - 1.0);
    rep.f3 = limit_is_zero(s, rho, ctrl.tail_tol, ctrl.plateau_factor);
  }

  // (f4): controlled scaling near zero and a well-defined ratio limit.
  {
    const std::vector<double> tau =
        geometric_grid(ctrl.tau_lo, ctrl.tau_hi, ctrl.tau_samples);
    const std::vector<double> s =
        geometric_grid(ctrl.s_small_lo, ctrl.s_small_hi, ctrl.samples / 4);
    double c1 = 0.0;
    bool finite = true;
    for (double t : tau)
      for (double sv : s) {
        const double den = eval_f(f, sv);
        if (den == 0.0) continue;
        const double bound = std::abs(eval_f(f, t * sv) / den) /
                             (1.0 + std::pow(t, f.p_star - 1.0));
        if (!std::isfinite(bound)) finite = false;
        c1 = std::max(c1, bound);
      }
    rep.f4_c1_estimate = c1;

    bool converges = true;
    for (double t : tau) {
      try {
        (void)compute_g0(f, t);
      } catch (const NumericalError&) {
        converges = false;
        break;
      }
    }
    rep.f4_ratio_converges = converges;
    rep.f4 = finite && converges;
  }

  return rep;
}

}  // namespace pbif
