#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "pbif/continuation.hpp"
#include "pbif/eigensolver.hpp"
#include "pbif/errors.hpp"
#include "pbif/nonlinearity.hpp"
#include "pbif/plaplace_operator.hpp"
#include "pbif/radial_mesh.hpp"

using namespace pbif;

namespace {

const double kPi = std::acos(-1.0);

GridFunction constant_data(const RadialMesh& mesh, double c) {
  GridFunction g;
  g.values.assign(mesh.node_count(), c);
  g.dirichlet_mask.assign(mesh.node_count(), 0);
  return g;
}

// -laplace u = lambda u - u^2 on the unit ball: a positive branch leaves the
// trivial line at lambda_1 = pi^2 and continues to the right.
struct Setup {
  RadialMesh mesh;
  Nonlinearity f;
  OperatorConfig cfg;
  EigenResult eig;

  explicit Setup(int nodes = 201)
      : mesh(build_mesh(DomainKind::ball, 0.0, 1.0, 3, nodes)),
        f(make_pure_power(6.0, 3.0)) {
    cfg.p = 2.0;
    cfg.dimension = 3;
    cfg.V = constant_data(mesh, 1.0);
    cfg.m = constant_data(mesh, -1.0);
    cfg.f = &f;
    eig = principal_eigenvalue(cfg.V, mesh, 2.0, +1);
  }
};

}  // namespace

TEST_CASE("newton accepts the trivial solution immediately") {
  Setup s(101);
  auto zero = make_grid_function(s.mesh);
  const auto res = newton_solve(1.0, zero, s.cfg, s.mesh);
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.residual_sup == 0.0);
}

TEST_CASE("newton falls back to the trivial branch below the eigenvalue") {
  Setup s(101);
  auto u0 = make_grid_function(s.mesh);
  for (std::size_t i = 0; i < s.mesh.node_count(); ++i)
    u0.values[i] = 0.01 * (1.0 - s.mesh.nodes[i] * s.mesh.nodes[i]);
  enforce_mask(u0);
  const auto res = newton_solve(5.0, u0, s.cfg, s.mesh, 1e-12);
  CHECK(res.converged);
  CHECK(sup_norm(res.u) < 1e-8);
}

TEST_CASE("predictor at zero amplitude is the exact trivial pair") {
  Setup s(101);
  const auto g = bifurcation_predictor(s.eig, 0.0, BifurcationSide::right);
  CHECK(g.lambda == s.eig.lambda);
  for (double v : g.u.values) CHECK(v == 0.0);
}

TEST_CASE("predictor scales the eigenfunction and offsets lambda by side") {
  Setup s(101);
  const auto right = bifurcation_predictor(s.eig, 0.01, BifurcationSide::right);
  const auto left = bifurcation_predictor(s.eig, 0.01, BifurcationSide::left);
  CHECK(right.lambda ==
        doctest::Approx(s.eig.lambda * 1.02).epsilon(1e-12));
  CHECK(left.lambda == doctest::Approx(s.eig.lambda * 0.98).epsilon(1e-12));
  const std::size_t mid = s.mesh.node_count() / 2;
  CHECK(right.u.values[mid] ==
        doctest::Approx(0.01 * s.eig.eigenfunction.values[mid]).epsilon(1e-14));
  CHECK_THROWS_AS(bifurcation_predictor(s.eig, -0.1, BifurcationSide::right),
                  ContractViolation);
}

TEST_CASE("amplitude-pinned corrector lands on the branch") {
  Setup s;
  const auto g = bifurcation_predictor(s.eig, 0.01, BifurcationSide::right);
  const auto res = amplitude_pinned_solve(g.lambda, g.u, 0.01, s.cfg, s.mesh);
  REQUIRE(res.converged);
  // amplitude is pinned at the eigenfunction peak (the ball center here)
  CHECK(res.u.values.front() == doctest::Approx(0.01).epsilon(1e-10));
  CHECK(std::abs(res.lambda - s.eig.lambda) < 0.05 * s.eig.lambda);
  CHECK(res.residual_sup < 1e-9);
}

TEST_CASE("seeding produces ascending positive small-amplitude points") {
  Setup s;
  const std::vector<double> amps{0.005, 0.0075, 0.01};
  const auto seeds =
      seed_branch(s.eig, BifurcationSide::right, amps, s.cfg, s.mesh);
  REQUIRE(seeds.size() == amps.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const auto& pt = seeds[k];
    CHECK(pt.sup_norm == doctest::Approx(amps[k]).epsilon(1e-6));
    CHECK(std::abs(pt.lambda - s.eig.lambda) < 0.05 * s.eig.lambda);
    CHECK(pt.residual_norm < 1e-9);
    CHECK_FALSE(pt.is_fold);
    for (std::size_t i = 0; i + 1 < s.mesh.node_count(); ++i)
      CHECK(pt.u.values[i] > 0.0);
  }
  // secant tangents are filled and consistent at the first two points
  CHECK(seeds[0].tangent_dlambda == seeds[1].tangent_dlambda);
  CHECK(seeds.back().tangent_dlambda != 0.0);
}

TEST_CASE("seeding validates its inputs") {
  Setup s(101);
  CHECK_THROWS_AS(
      seed_branch(s.eig, BifurcationSide::right, {}, s.cfg, s.mesh),
      ContractViolation);
  CHECK_THROWS_AS(seed_branch(s.eig, BifurcationSide::right,
                              {0.01, 0.005}, s.cfg, s.mesh),
                  ContractViolation);
  EigenResult bad = s.eig;
  bad.status = EigenStatus::max_iter;
  CHECK_THROWS_AS(seed_branch(bad, BifurcationSide::right, {0.01}, s.cfg,
                              s.mesh),
                  ContractViolation);
}

TEST_CASE("tracing runs to the lambda cap on a monotone branch") {
  Setup s;
  const std::vector<double> amps{0.005, 0.0075, 0.01};
  const auto seeds =
      seed_branch(s.eig, BifurcationSide::right, amps, s.cfg, s.mesh);

  TraceOptions opts;
  opts.lambda_hi = 1.3 * s.eig.lambda;
  opts.step0 = 0.02;
  // direction from the last two seeds
  const auto& a = seeds[seeds.size() - 2];
  const auto& b = seeds.back();
  opts.tangent_u.resize(s.mesh.node_count());
  for (std::size_t i = 0; i < s.mesh.node_count(); ++i)
    opts.tangent_u[i] = b.u.values[i] - a.u.values[i];
  opts.tangent_lambda = b.lambda - a.lambda;

  const auto br = trace_branch(b, s.cfg, s.mesh, BranchOrigin::lambda_1, opts);
  CHECK(br.termination == BranchTermination::lambda_cap);
  REQUIRE(br.points.size() > 3);
  CHECK(br.points.back().lambda > opts.lambda_hi);
  for (const auto& pt : br.points) {
    CHECK(pt.residual_norm < 1e-8);
    for (std::size_t i = 0; i + 1 < s.mesh.node_count(); ++i)
      CHECK(pt.u.values[i] > 0.0);
  }
  // amplitude grows with lambda along this branch
  CHECK(br.points.back().sup_norm > br.points.front().sup_norm);
}

TEST_CASE("tracing stops at the point budget") {
  Setup s;
  const auto seeds = seed_branch(s.eig, BifurcationSide::right,
                                 {0.005, 0.0075, 0.01}, s.cfg, s.mesh);
  TraceOptions opts;
  opts.max_points = 3;
  opts.step0 = 0.01;
  const auto& a = seeds[seeds.size() - 2];
  const auto& b = seeds.back();
  opts.tangent_u.resize(s.mesh.node_count());
  for (std::size_t i = 0; i < s.mesh.node_count(); ++i)
    opts.tangent_u[i] = b.u.values[i] - a.u.values[i];
  opts.tangent_lambda = b.lambda - a.lambda;
  const auto br = trace_branch(b, s.cfg, s.mesh, BranchOrigin::lambda_1, opts);
  CHECK(br.points.size() == 3);
  CHECK(br.diagnostic == "max_points reached");
}

TEST_CASE("fold detection marks tangent sign changes") {
  Branch br;
  br.points.resize(4);
  br.points[0].tangent_dlambda = 1.0;
  br.points[1].tangent_dlambda = 0.5;
  br.points[2].tangent_dlambda = -0.3;
  br.points[3].tangent_dlambda = -1.0;
  const auto folds = detect_folds(br);
  REQUIRE(folds.size() == 1);
  CHECK(folds[0] == 1);
  CHECK(br.points[1].is_fold);
  CHECK_FALSE(br.points[0].is_fold);
  CHECK_FALSE(br.points[2].is_fold);

  Branch tiny;
  tiny.points.resize(2);
  CHECK_THROWS_AS(detect_folds(tiny), ContractViolation);
}
