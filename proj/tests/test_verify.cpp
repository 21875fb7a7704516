#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pbif/continuation.hpp"
#include "pbif/eigensolver.hpp"
#include "pbif/errors.hpp"
#include "pbif/nonlinearity.hpp"
#include "pbif/radial_mesh.hpp"
#include "pbif/verify.hpp"
#include "pbif/weights.hpp"

using namespace pbif;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridFunction profile(const RadialMesh& mesh, double (*fn)(double),
                     double shift = 0.0) {
  GridFunction g;
  for (double r : mesh.nodes) g.values.push_back(fn(r) + shift);
  g.dirichlet_mask.assign(mesh.node_count(), 0);
  return g;
}

double bump(double r) { return 1.0 - r * r; }
double steeper(double r) { return (1.0 - r * r) * (1.0 - 0.5 * r); }

WeightSpec constant_weight(double c) {
  WeightSpec w;
  w.pieces.push_back({0.0, 1.0, Polynomial{{c}}});
  return w;
}

WeightSpec three_piece() {
  WeightSpec w;
  w.pieces.push_back({0.0, 1.0 / 3.0, Polynomial{{1.0}}});
  w.pieces.push_back({1.0 / 3.0, 2.0 / 3.0, Polynomial{{0.0}}});
  w.pieces.push_back({2.0 / 3.0, 1.0, Polynomial{{-1.0}}});
  return w;
}

// Branch whose rows carry prescribed norms; profiles are irrelevant to the
// sup-norm growth check.
Branch synthetic_branch(const std::vector<double>& sup,
                        const std::vector<double>& lp_star) {
  Branch br;
  br.points.resize(sup.size());
  for (std::size_t k = 0; k < sup.size(); ++k) {
    br.points[k].sup_norm = sup[k];
    br.points[k].lp_star_norm = lp_star[k];
    br.points[k].residual_norm = 0.0;
  }
  return br;
}

}  // namespace

TEST_CASE("picone difference vanishes on proportional pairs") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 201);
  const auto v2 = profile(mesh, bump, 1e-8);
  for (double p : {2.0, 3.0}) {
    auto v1 = v2;
    auto pair1 = picone(v1, v2, mesh, p);
    for (auto v : pair1.L) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t c = 0; c < pair1.L.size(); ++c)
      CHECK(pair1.L[c] - pair1.R[c] == doctest::Approx(0.0).epsilon(1e-10));

    for (auto& v : v1.values) v *= 2.0;
    auto pair2 = picone(v1, v2, mesh, p);
    for (std::size_t c = 0; c < pair2.L.size(); ++c)
      CHECK(pair2.L[c] - pair2.R[c] == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("picone left side is pointwise nonnegative") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 301);
  const auto v1 = profile(mesh, steeper);
  const auto v2 = profile(mesh, bump, 1e-8);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto pr = picone(v1, v2, mesh, p);
    REQUIRE(pr.L.size() == mesh.node_count() - 1);
    for (double v : pr.L) CHECK(v >= -1e-12);
  }
}

TEST_CASE("picone cell difference shrinks under refinement") {
  // the discrete L - R mismatch is a quadrature artifact of order h
  double worst[2];
  int k = 0;
  for (int n : {101, 201}) {
    const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, n);
    const auto v1 = profile(mesh, steeper);
    const auto v2 = profile(mesh, bump, 1e-8);
    const auto pr = picone(v1, v2, mesh, 2.0);
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < pr.L.size(); ++c)
      acc = std::max(acc, std::abs(pr.L[c] - pr.R[c]));
    worst[k++] = acc;
  }
  CHECK(worst[1] < 0.75 * worst[0]);
}

TEST_CASE("picone validates sign requirements") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 51);
  const auto good = profile(mesh, bump, 1e-8);
  auto negative = profile(mesh, bump);
  negative.values[10] = -0.1;
  auto touching_zero = profile(mesh, bump);  // hits 0 at the boundary node
  CHECK_THROWS_AS(picone(negative, good, mesh, 2.0), ContractViolation);
  CHECK_THROWS_AS(picone(good, touching_zero, mesh, 2.0), ContractViolation);
  CHECK_THROWS_AS(picone(good, good, mesh, 1.0), ContractViolation);
}

TEST_CASE("sup-norm growth check passes a flat synthetic branch") {
  // constant sup-norm, spreading critical norm: slope ~ 0
  const auto f = make_log_damped(6.0, 1.0);
  const auto br = synthetic_branch({1.0, 1.0, 1.0, 1.0, 1.0},
                                   {1.0, 2.0, 4.0, 8.0, 16.0});
  const auto rep = linf_estimate_check(br, f, 2.0, 3, 0.05, 10.0, 1.0);
  CHECK(rep.status == CheckStatus::pass);
  CHECK(rep.points_used == 5);
  CHECK(rep.slope == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rep.exponent_bound ==
        doctest::Approx((6.0 - 1.0) * 2.0 / 3.0 + 0.05).epsilon(1e-12));
}

TEST_CASE("sup-norm growth check fails an explosive synthetic branch") {
  const auto f = make_log_damped(6.0, 1.0);
  // sup-norm explodes while the critical norm barely moves
  const auto br = synthetic_branch({1.0, 1e2, 1e4, 1e6, 1e8},
                                   {1.0, 1.01, 1.02, 1.03, 1.04});
  const auto rep = linf_estimate_check(br, f, 2.0, 3, 0.05, 10.0, 1.0);
  CHECK(rep.status == CheckStatus::fail);
  CHECK(rep.slope > rep.exponent_bound + rep.slack);
}

TEST_CASE("sup-norm growth check reports thin or unconverged data") {
  const auto f = make_log_damped(6.0, 1.0);
  // only three points clear the amplitude threshold
  const auto thin = synthetic_branch({0.1, 0.2, 1.0, 2.0, 4.0},
                                     {0.1, 0.2, 1.0, 2.0, 4.0});
  CHECK(linf_estimate_check(thin, f, 2.0, 3, 0.05, 10.0, 1.0).status ==
        CheckStatus::inconclusive);

  auto stale = synthetic_branch({1.0, 2.0, 4.0, 8.0}, {1.0, 2.0, 4.0, 8.0});
  for (auto& pt : stale.points) pt.residual_norm = 1e-3;
  CHECK(linf_estimate_check(stale, f, 2.0, 3, 0.05, 10.0, 1.0).status ==
        CheckStatus::not_applicable);
}

TEST_CASE("window for a sign-changing m with unit V") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 401);
  const auto V = constant_weight(1.0);
  const auto m = three_piece();
  const auto f = make_log_damped(6.0, 1.0);  // nonnegative: C0 = 0, alpha = 1
  const auto rep = nonexistence_window(V, m, f, mesh, 2.0);
  CHECK(rep.from_plus0);
  CHECK(rep.from_zero);
  CHECK(rep.C0 == 0.0);
  CHECK(rep.alpha_plus0 == 1.0);
  // V has no negative part, so both lower ends stay at the sentinel
  CHECK(rep.lo == -kInf);
  // upper end comes from the wider set {m >= 0} = (0, 2/3)
  const auto ones = evaluate(constant_weight(1.0), mesh);
  const double lam = eigenvalue_on_components(
      ones, {Interval{0.0, 2.0 / 3.0}}, mesh, 2.0, +1);
  CHECK(rep.hi == doctest::Approx(lam).epsilon(1e-6));
  CHECK(std::isfinite(rep.hi));
}

TEST_CASE("window closes up when C0 is positive") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 301);
  // dipping reaction: C0 = 1 within table resolution, so alpha > 1
  std::vector<double> s{0.0};
  double x = 1e-4;
  while (x < 4.0) {
    s.push_back(x);
    x *= 1.35;
  }
  s.push_back(4.0);
  std::vector<double> fv;
  for (double v : s) fv.push_back(v * (v - 1.0));
  const auto f = make_custom(std::move(s), std::move(fv), 6.0);
  const auto rep =
      nonexistence_window(constant_weight(1.0), three_piece(), f, mesh, 2.0);
  CHECK(rep.from_plus0);
  CHECK(rep.C0 == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(rep.alpha_plus0 > 1.0);
  CHECK(rep.alpha_plus0 ==
        doctest::Approx(1.0 + rep.C0 * rep.sup_m_plus /
                                  rep.lambda1_plus0_weight1)
            .epsilon(1e-12));
}

TEST_CASE("window degenerates without the sign hypotheses") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 101);
  const auto rep = nonexistence_window(constant_weight(1.0),
                                       constant_weight(1.0),
                                       make_log_damped(6.0, 1.0), mesh, 2.0);
  CHECK_FALSE(rep.from_plus0);  // m never changes sign: (m1) fails
  CHECK_FALSE(rep.from_zero);   // {m = 0} has empty interior
  CHECK(rep.lo == -kInf);
  CHECK(rep.hi == kInf);
}

TEST_CASE("bifurcation direction follows the sign of the projected weight") {
  const auto mesh = build_mesh(DomainKind::ball, 0.0, 1.0, 3, 201);
  GridFunction ones;
  ones.values.assign(mesh.node_count(), 1.0);
  ones.dirichlet_mask.assign(mesh.node_count(), 0);
  const auto eig = principal_eigenvalue(ones, mesh, 2.0, +1);
  REQUIRE(eig.status == EigenStatus::converged);
  const auto f = make_pure_power(6.0, 3.0);

  GridFunction m_neg = ones, m_pos = ones;
  for (auto& v : m_neg.values) v = -1.0;

  const auto right = bifurcation_direction(m_neg, eig, f, mesh);
  CHECK(right.integral < 0.0);
  CHECK(right.g0_q == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(right.from_lambda1 == BifSide::right);
  CHECK(right.from_lambda_minus1 == BifSide::left);

  const auto wrong = bifurcation_direction(m_pos, eig, f, mesh);
  CHECK(wrong.integral > 0.0);
  CHECK(wrong.from_lambda1 == BifSide::hypothesis_violated);
}
