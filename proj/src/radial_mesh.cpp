#include "pbif/radial_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pbif/errors.hpp"
#include "pbif/numerics.hpp"

namespace pbif {

double unit_sphere_area(int dim) {
  if (dim < 1) throw ContractViolation("unit_sphere_area: dim must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

RadialMesh build_mesh(DomainKind kind, double r_inner, double r_outer,
                      int dimension, int node_count, double grading) {
  if (dimension < 2) throw ContractViolation("build_mesh: dimension must be >= 2");
  if (node_count < 3) throw ContractViolation("build_mesh: node_count must be >= 3");
  if (!(grading > 0.0)) throw ContractViolation("build_mesh: grading must be > 0");
  if (!(r_inner < r_outer)) throw ContractViolation("build_mesh: need r_inner < r_outer");
  if (kind == DomainKind::ball && r_inner != 0.0)
    throw ContractViolation("build_mesh: ball mesh must start at r = 0");
  if (kind == DomainKind::annulus && !(r_inner > 0.0))
    throw ContractViolation("build_mesh: annulus inner radius must be > 0");

  RadialMesh mesh;
  mesh.kind = kind;
  mesh.dimension = dimension;

  const int cells = node_count - 1;
  // Cell widths h_i = h_0 * rho^i with rho^(cells-1) = 1/grading, so the
  // first/last width ratio equals the grading factor.
  const double rho = (cells > 1) ? std::pow(grading, -1.0 / (cells - 1)) : 1.0;
  std::vector<double> widths(cells);
  double total = 0.0;
  double w = 1.0;
  for (int i = 0; i < cells; ++i) {
    widths[i] = w;
    total += w;
    w *= rho;
  }
  const double scale = (r_outer - r_inner) / total;
  mesh.nodes.resize(node_count);
  mesh.nodes[0] = r_inner;
  for (int i = 0; i < cells; ++i) mesh.nodes[i + 1] = mesh.nodes[i] + widths[i] * scale;
  mesh.nodes.back() = r_outer;  // kill accumulation error at the boundary

  mesh.surface_factor = unit_sphere_area(dimension);

  const int n = node_count;
  mesh.cell_width.resize(cells);
  mesh.cell_mid_weight.resize(cells);
  for (int c = 0; c < cells; ++c) {
    mesh.cell_width[c] = mesh.nodes[c + 1] - mesh.nodes[c];
    const double rm = 0.5 * (mesh.nodes[c] + mesh.nodes[c + 1]);
    mesh.cell_mid_weight[c] = std::pow(rm, dimension - 1);
  }

  mesh.dual_width.resize(n);
  for (int i = 1; i + 1 < n; ++i)
    mesh.dual_width[i] = 0.5 * (mesh.nodes[i + 1] - mesh.nodes[i - 1]);
  // At a ball center the reflected ghost node makes the dual cell a full
  // first cell wide; this keeps a uniform-mesh Jacobian symmetric in row 0.
  mesh.dual_width[0] = (kind == DomainKind::ball) ? mesh.cell_width[0]
                                                  : 0.5 * mesh.cell_width[0];
  mesh.dual_width[n - 1] = 0.5 * mesh.cell_width[cells - 1];

  mesh.node_weight.resize(n);
  for (int i = 0; i < n; ++i) {
    double width = 0.0;
    if (i > 0) width += 0.5 * mesh.cell_width[i - 1];
    if (i + 1 < n) width += 0.5 * mesh.cell_width[i];
    mesh.node_weight[i] =
        mesh.surface_factor * std::pow(mesh.nodes[i], dimension - 1) * width;
  }

  mesh.boundary_mask.assign(n, 0);
  mesh.boundary_mask[n - 1] = 1;
  if (kind == DomainKind::annulus) mesh.boundary_mask[0] = 1;
  return mesh;
}

GridFunction make_grid_function(const RadialMesh& mesh, double fill) {
  GridFunction g;
  g.values.assign(mesh.node_count(), fill);
  g.dirichlet_mask = mesh.boundary_mask;
  return enforce_mask(g);
}

GridFunction& enforce_mask(GridFunction& g) {
  for (std::size_t i = 0; i < g.values.size(); ++i)
    if (g.dirichlet_mask[i]) g.values[i] = 0.0;
  return g;
}

namespace {
void check_aligned(const GridFunction& g, const RadialMesh& mesh,
                   const char* who) {
  if (g.values.size() != mesh.node_count() ||
      g.dirichlet_mask.size() != mesh.node_count())
    throw ContractViolation(std::string(who) + ": grid function does not match mesh");
}
}  // namespace

double integrate(const GridFunction& g, const RadialMesh& mesh) {
  check_aligned(g, mesh, "integrate");
  double acc = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i)
    acc += mesh.node_weight[i] * g.values[i];
  return acc;
}

std::vector<double> gradient_midpoints(const GridFunction& g,
                                       const RadialMesh& mesh) {
  check_aligned(g, mesh, "gradient_midpoints");
  std::vector<double> d(mesh.cell_width.size());
  for (std::size_t c = 0; c < d.size(); ++c)
    d[c] = (g.values[c + 1] - g.values[c]) / mesh.cell_width[c];
  return d;
}

double sup_norm(const GridFunction& g) {
  double m = 0.0;
  for (double v : g.values) m = std::max(m, std::abs(v));
  return m;
}

double lebesgue_norm(const GridFunction& g, const RadialMesh& mesh, double q) {
  check_aligned(g, mesh, "lebesgue_norm");
  if (!(q >= 1.0)) throw ContractViolation("lebesgue_norm: exponent must be >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i)
    acc += mesh.node_weight[i] * std::pow(std::abs(g.values[i]), q);
  return std::pow(acc, 1.0 / q);
}

double sobolev_seminorm(const GridFunction& g, const RadialMesh& mesh,
                        double p) {
  check_aligned(g, mesh, "sobolev_seminorm");
  if (!(p > 1.0)) throw ContractViolation("sobolev_seminorm: exponent must be > 1");
  const std::vector<double> d = gradient_midpoints(g, mesh);
  double acc = 0.0;
  for (std::size_t c = 0; c < d.size(); ++c)
    acc += mesh.surface_factor * mesh.cell_mid_weight[c] *
           std::pow(std::abs(d[c]), p) * mesh.cell_width[c];
  return std::pow(acc, 1.0 / p);
}

double norm(const GridFunction& g, const RadialMesh& mesh, const NormSpec& ns) {
  switch (ns.kind) {
    case NormSpec::Kind::lebesgue: return lebesgue_norm(g, mesh, ns.exponent);
    case NormSpec::Kind::sup: return sup_norm(g);
    case NormSpec::Kind::sobolev_seminorm:
      return sobolev_seminorm(g, mesh, ns.exponent);
  }
  throw ContractViolation("norm: unknown kind");
}

}  // namespace pbif
