#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pbif/errors.hpp"
#include "pbif/radial_mesh.hpp"

using namespace pbif;

namespace {

// Fills nodal values from a function of r without touching boundary nodes'
// mask semantics (data fields, not solution fields).
GridFunction sample(const RadialMesh& mesh, double (*fn)(double)) {
  GridFunction g;
  g.values.reserve(mesh.node_count());
  for (double r : mesh.nodes) g.values.push_back(fn(r));
  g.dirichlet_mask.assign(mesh.node_count(), 0);
  return g;
}

double one(double) { return 1.0; }
double parabola(double r) { return 1.0 - r * r; }

}  // namespace

TEST_CASE("ball mesh basic structure") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 11);
  REQUIRE(mesh.node_count() == 11);
  CHECK(mesh.nodes.front() == 0.0);
  CHECK(mesh.nodes.back() == 1.0);
  CHECK(mesh.surface_factor ==
        doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-14));
  CHECK(mesh.boundary_mask.front() == 0);  // center is a free node on a ball
  CHECK(mesh.boundary_mask.back() == 1);
  CHECK(mesh.cell_width.size() == 10);
  CHECK(mesh.dual_width.size() == 11);
  // center dual control volume spans the whole first cell
  CHECK(mesh.dual_width.front() ==
        doctest::Approx(mesh.cell_width.front()).epsilon(1e-14));
}

TEST_CASE("annulus mesh masks both ends") {
  const auto mesh = build_mesh(DomainKind::annulus, 0.5, 1.0, 3, 9);
  CHECK(mesh.boundary_mask.front() == 1);
  CHECK(mesh.boundary_mask.back() == 1);
  CHECK(mesh.nodes.front() == 0.5);
}

TEST_CASE("grading controls the first/last width ratio") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 41, 4.0);
  CHECK(mesh.cell_width.front() / mesh.cell_width.back() ==
        doctest::Approx(4.0).epsilon(1e-10));
  // consecutive widths shrink by a constant factor
  const double ratio = mesh.cell_width[1] / mesh.cell_width[0];
  for (std::size_t k = 1; k + 1 < mesh.cell_width.size(); ++k)
    CHECK(mesh.cell_width[k + 1] / mesh.cell_width[k] ==
          doctest::Approx(ratio).epsilon(1e-10));
}

TEST_CASE("mesh construction rejects bad arguments") {
  CHECK_THROWS_AS(build_mesh(DomainKind::ball, 0.1, 1.0, 3, 11),
                  ContractViolation);
  CHECK_THROWS_AS(build_mesh(DomainKind::annulus, 0.0, 1.0, 3, 11),
                  ContractViolation);
  CHECK_THROWS_AS(build_mesh(DomainKind::ball, 0.0, 1.0, 1, 11),
                  ContractViolation);
  CHECK_THROWS_AS(build_mesh(DomainKind::ball, 0.0, 1.0, 3, 2),
                  ContractViolation);
  CHECK_THROWS_AS(build_mesh(DomainKind::ball, 0.0, 1.0, 3, 11, 0.0),
                  ContractViolation);
  CHECK_THROWS_AS(build_mesh(DomainKind::annulus, 1.0, 0.5, 3, 11),
                  ContractViolation);
}

TEST_CASE("integrate recovers solid volumes") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 2001);
  const auto ones = sample(mesh, one);
  CHECK(integrate(ones, mesh) ==
        doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-6));

  // annulus volume 4*pi/3*(1 - 0.5^3)
  const auto ann = build_mesh(DomainKind::annulus, 0.5, 1.0, 3, 2001);
  const auto ones_ann = sample(ann, one);
  CHECK(integrate(ones_ann, ann) ==
        doctest::Approx(4.0 * std::numbers::pi / 3.0 * (1.0 - 0.125))
            .epsilon(1e-6));
}

TEST_CASE("integrate matches the closed form for a parabolic profile") {
  // int_{B_1} (1 - r^2) dV = 4*pi*(1/3 - 1/5) = 8*pi/15
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 2001);
  const auto u = sample(mesh, parabola);
  CHECK(integrate(u, mesh) ==
        doctest::Approx(8.0 * std::numbers::pi / 15.0).epsilon(1e-6));
}

TEST_CASE("trapezoid integration converges at second order") {
  const double exact = 8.0 * std::numbers::pi / 15.0;
  double errs[2];
  int k = 0;
  for (int n : {101, 201}) {
    const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, n);
    errs[k++] = std::abs(integrate(sample(mesh, parabola), mesh) - exact);
  }
  const double order = std::log2(errs[0] / errs[1]);
  CHECK(order > 1.8);
}

TEST_CASE("gradient_midpoints is exact on affine data") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 17, 2.0);
  GridFunction g;
  for (double r : mesh.nodes) g.values.push_back(3.0 * r - 1.0);
  g.dirichlet_mask.assign(mesh.node_count(), 0);
  const auto dg = gradient_midpoints(g, mesh);
  REQUIRE(dg.size() == mesh.node_count() - 1);
  for (double v : dg) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("lebesgue and sobolev norms of the parabolic profile") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 4001);
  const auto u = sample(mesh, parabola);
  // ||1-r^2||_{L^2}^2 = 4*pi*(1/3 - 2/5 + 1/7) = 32*pi/105
  CHECK(lebesgue_norm(u, mesh, 2.0) ==
        doctest::Approx(std::sqrt(32.0 * std::numbers::pi / 105.0))
            .epsilon(1e-6));
  // |grad(1-r^2)| = 2r, so seminorm^2 = 4*pi*4*(1/5) = 16*pi/5
  CHECK(sobolev_seminorm(u, mesh, 2.0) ==
        doctest::Approx(std::sqrt(16.0 * std::numbers::pi / 5.0))
            .epsilon(1e-5));
  CHECK(sup_norm(u) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("norm dispatches on the spec kind") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 101);
  const auto u = sample(mesh, parabola);
  NormSpec ns;
  ns.kind = NormSpec::Kind::sup;
  CHECK(norm(u, mesh, ns) == sup_norm(u));
  ns.kind = NormSpec::Kind::lebesgue;
  ns.exponent = 6.0;
  CHECK(norm(u, mesh, ns) == lebesgue_norm(u, mesh, 6.0));
  ns.kind = NormSpec::Kind::sobolev_seminorm;
  ns.exponent = 2.0;
  CHECK(norm(u, mesh, ns) == sobolev_seminorm(u, mesh, 2.0));
}

TEST_CASE("make_grid_function applies the Dirichlet mask") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 11);
  auto g = make_grid_function(mesh, 5.0);
  REQUIRE(g.values.size() == mesh.node_count());
  CHECK(g.values.front() == 5.0);   // free center node keeps the fill
  CHECK(g.values.back() == 0.0);    // Dirichlet node is forced to zero
  g.values.back() = 3.0;
  enforce_mask(g);
  CHECK(g.values.back() == 0.0);
}

TEST_CASE("size mismatches are rejected") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 11);
  GridFunction g;
  g.values.assign(7, 1.0);
  g.dirichlet_mask.assign(7, 0);
  CHECK_THROWS_AS(integrate(g, mesh), ContractViolation);
  CHECK_THROWS_AS(gradient_midpoints(g, mesh), ContractViolation);
}
