#include "pbif/plaplace_operator.hpp"

#include <cmath>
#include <string>

#include "pbif/errors.hpp"

namespace pbif {

double flux_density(double g, double p, double delta_reg) {
  return std::pow(g * g + delta_reg * delta_reg, 0.5 * (p - 2.0)) * g;
}

double flux_density_prime(double g, double p, double delta_reg) {
  const double s = g * g + delta_reg * delta_reg;
  if (s == 0.0) {
    if (p > 2.0) return 0.0;
    if (p == 2.0) return 1.0;
    throw NumericalError("flux_density_prime: singular linearization (p < 2, flat slope, delta_reg = 0)");
  }
  return std::pow(s, 0.5 * (p - 4.0)) * ((p - 1.0) * g * g + delta_reg * delta_reg);
}

namespace {

void check_cfg(const GridFunction& u, const OperatorConfig& cfg,
               const RadialMesh& mesh, const char* who) {
  const std::size_t n = mesh.node_count();
  if (u.values.size() != n || cfg.V.values.size() != n || cfg.m.values.size() != n)
    throw ContractViolation(std::string(who) + ": state/weights do not match mesh");
  if (!(cfg.p > 1.0)) throw ContractViolation(std::string(who) + ": p must be > 1");
  if (cfg.f == nullptr) {
    for (double mv : cfg.m.values)
      if (mv != 0.0)
        throw ContractViolation(std::string(who) +
                                ": nonzero m requires a nonlinearity");
  }
}

inline double signed_power(double u, double p) {
  if (u == 0.0) return 0.0;
  return std::pow(std::abs(u), p - 2.0) * u;
}

}  // namespace

GridFunction residual(const GridFunction& u, const OperatorConfig& cfg,
                      const RadialMesh& mesh) {
  check_cfg(u, cfg, mesh, "residual");
  const std::size_t n = mesh.node_count();
  GridFunction R;
  R.values.assign(n, 0.0);
  R.dirichlet_mask = u.dirichlet_mask;

  // fluxes w_{i+1/2} * phi(Du_{i+1/2}) at the cell midpoints
  std::vector<double> flux(n - 1);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double du = (u.values[c + 1] - u.values[c]) / mesh.cell_width[c];
    flux[c] = mesh.cell_mid_weight[c] * flux_density(du, cfg.p, cfg.delta_reg);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (u.dirichlet_mask[i]) continue;
    const double left = (i == 0) ? 0.0 : flux[i - 1];  // zero symmetry flux at r = 0
    const double right = (i + 1 < n) ? flux[i] : 0.0;
    const double w = std::pow(mesh.nodes[i], mesh.dimension - 1);
    double source = cfg.lambda * cfg.V.values[i] * signed_power(u.values[i], cfg.p);
    if (cfg.f != nullptr && cfg.m.values[i] != 0.0)
      source += cfg.m.values[i] * eval_f(*cfg.f, std::max(u.values[i], 0.0));
    R.values[i] = -(right - left) / mesh.dual_width[i] - w * source;
  }
  return R;
}

TridiagonalSystem jacobian(const GridFunction& u, const OperatorConfig& cfg,
                           const RadialMesh& mesh) {
  check_cfg(u, cfg, mesh, "jacobian");
  const std::size_t n = mesh.node_count();
  TridiagonalSystem J;
  J.sub.assign(n, 0.0);
  J.diag.assign(n, 0.0);
  J.super.assign(n, 0.0);

  std::vector<double> dflux(n - 1);  // d(flux)/d(Du) * 1/h
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double du = (u.values[c + 1] - u.values[c]) / mesh.cell_width[c];
    dflux[c] = mesh.cell_mid_weight[c] *
               flux_density_prime(du, cfg.p, cfg.delta_reg) / mesh.cell_width[c];
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (u.dirichlet_mask[i]) {
      J.diag[i] = 1.0;  // identity row
      continue;
    }
    const double inv_dual = 1.0 / mesh.dual_width[i];
    if (i > 0) {
      J.sub[i] = -dflux[i - 1] * inv_dual;
      J.diag[i] += dflux[i - 1] * inv_dual;
    }
    if (i + 1 < n) {
      J.super[i] = -dflux[i] * inv_dual;
      J.diag[i] += dflux[i] * inv_dual;
    }
    const double w = std::pow(mesh.nodes[i], mesh.dimension - 1);
    double dsource = cfg.lambda * cfg.V.values[i] * (cfg.p - 1.0) *
                     std::pow(std::abs(u.values[i]), cfg.p - 2.0);
    if (u.values[i] == 0.0 && cfg.p < 2.0) dsource = 0.0;  // one-sided convention
    if (cfg.f != nullptr && cfg.m.values[i] != 0.0 && u.values[i] > 0.0)
      dsource += cfg.m.values[i] * eval_f_prime(*cfg.f, u.values[i]);
    J.diag[i] -= w * dsource;
    // couplings into Dirichlet columns are dropped (those unknowns are fixed)
    if (i > 0 && u.dirichlet_mask[i - 1]) J.sub[i] = 0.0;
    if (i + 1 < n && u.dirichlet_mask[i + 1]) J.super[i] = 0.0;
  }
  return J;
}

std::vector<double> lambda_derivative(const GridFunction& u,
                                      const OperatorConfig& cfg,
                                      const RadialMesh& mesh) {
  check_cfg(u, cfg, mesh, "lambda_derivative");
  const std::size_t n = mesh.node_count();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (u.dirichlet_mask[i]) continue;
    const double w = std::pow(mesh.nodes[i], mesh.dimension - 1);
    d[i] = -w * cfg.V.values[i] * signed_power(u.values[i], cfg.p);
  }
  return d;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& T,
                                      std::vector<double> rhs) {
  const std::size_t n = T.size();
  if (rhs.size() != n || T.sub.size() != n || T.super.size() != n)
    throw ContractViolation("solve_tridiagonal: size mismatch");
  if (n == 0) return rhs;

  // Banded LU with partial pivoting; pivoting between adjacent rows fills one
  // extra superdiagonal.
  std::vector<double> d = T.diag, e = T.super, s = T.sub;
  std::vector<double> e2(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double pivot = d[k];
    if (std::abs(s[k + 1]) > std::abs(pivot)) {
      std::swap(d[k], s[k + 1]);
      // after swap: row k is the old row k+1
      const double tmp_e = e[k];
      e[k] = d[k + 1];
      d[k + 1] = tmp_e;
      e2[k] = e[k + 1];
      e[k + 1] = 0.0;
      std::swap(rhs[k], rhs[k + 1]);
      pivot = d[k];
    }
    if (pivot == 0.0)
      throw NumericalError("solve_tridiagonal: zero pivot at row " + std::to_string(k));
    const double l = s[k + 1] / pivot;
    d[k + 1] -= l * e[k];
    e[k + 1] -= l * e2[k];
    rhs[k + 1] -= l * rhs[k];
    s[k + 1] = 0.0;
  }
  if (d[n - 1] == 0.0)
    throw NumericalError("solve_tridiagonal: zero pivot at last row");

  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / d[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    double acc = rhs[k] - e[k] * x[k + 1];
    if (k + 2 < n) acc -= e2[k] * x[k + 2];
    x[k] = acc / d[k];
  }
  return x;
}

std::vector<double> tridiagonal_apply(const TridiagonalSystem& T,
                                      const std::vector<double>& x) {
  const std::size_t n = T.size();
  if (x.size() != n) throw ContractViolation("tridiagonal_apply: size mismatch");
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = T.diag[i] * x[i];
    if (i > 0) y[i] += T.sub[i] * x[i - 1];
    if (i + 1 < n) y[i] += T.super[i] * x[i + 1];
  }
  return y;
}

}  // namespace pbif
