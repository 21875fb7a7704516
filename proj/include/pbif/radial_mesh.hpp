#pragma once

#include <cstdint>
#include <vector>

namespace pbif {

enum class DomainKind { ball, annulus };

// 1D mesh for radially symmetric problems on a ball or annulus in R^dimension.
// All volume integrals carry the weight r^{dimension-1} together with the
// surface factor of the unit sphere, so nodal quantities represent the full
// N-dimensional object.
struct RadialMesh {
  DomainKind kind = DomainKind::ball;
  int dimension = 3;
  std::vector<double> nodes;  // strictly increasing, nodes[0] == 0 for a ball

  double surface_factor = 0.0;  // area of the unit (dimension-1)-sphere

  // Precomputed tables, sized node_count()-1 for cell quantities and
  // node_count() for nodal ones.
  std::vector<double> cell_width;
  std::vector<double> cell_mid_weight;  // r_mid^{dimension-1}
  std::vector<double> dual_width;       // ball center row uses the full first cell
  std::vector<double> node_weight;      // trapezoid weight incl. r^{dim-1} and surface factor
  std::vector<std::uint8_t> boundary_mask;  // 1 where homogeneous Dirichlet applies

  std::size_t node_count() const { return nodes.size(); }
  double inner() const { return nodes.front(); }
  double outer() const { return nodes.back(); }
};

// Builds a mesh with node spacings in geometric progression: grading g > 1
// shrinks cells toward the outer boundary by a total first/last width ratio
// of g; g == 1 is uniform. A ball mesh starts at r = 0 and marks only the
// outer node Dirichlet; an annulus marks both ends.
// Requires dimension >= 2, node_count >= 3, grading > 0, and 0 <= r_inner <
// r_outer (r_inner == 0 exactly for a ball, > 0 for an annulus).
RadialMesh build_mesh(DomainKind kind, double r_inner, double r_outer,
                      int dimension, int node_count, double grading = 1.0);

// Nodal values aligned with a mesh. Entries under the Dirichlet mask are
// kept identically zero by every operation in this library.
struct GridFunction {
  std::vector<double> values;
  std::vector<std::uint8_t> dirichlet_mask;
};

GridFunction make_grid_function(const RadialMesh& mesh, double fill = 0.0);

// Zeroes the masked entries in place; returns the same object for chaining.
GridFunction& enforce_mask(GridFunction& g);

// Trapezoid rule for the N-dimensional volume integral of g.
double integrate(const GridFunction& g, const RadialMesh& mesh);

// One-sided difference quotients at the cell midpoints; length node_count()-1.
std::vector<double> gradient_midpoints(const GridFunction& g,
                                       const RadialMesh& mesh);

double sup_norm(const GridFunction& g);
double lebesgue_norm(const GridFunction& g, const RadialMesh& mesh, double q);
// Midpoint-rule W^{1,p} seminorm using gradient_midpoints.
double sobolev_seminorm(const GridFunction& g, const RadialMesh& mesh,
                        double p);

struct NormSpec {
  enum class Kind { lebesgue, sup, sobolev_seminorm } kind = Kind::sup;
  double exponent = 2.0;
};

double norm(const GridFunction& g, const RadialMesh& mesh, const NormSpec& ns);

}  // namespace pbif
