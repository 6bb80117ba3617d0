#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/submanifold.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pencilkit;
using namespace pencilkit::testing;

namespace {

Pencil semisimple3_pair() {
  const Chart c = make_chart({"x1", "x2", "x3"},
                             {{1.0, 2.0}, {2.5, 3.5}, {4.0, 5.0}});
  return Pencil::build(
      c,
      make_metric(c, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}},
                  Variance::Contravariant),
      make_metric(c, {{"x1", "0", "0"}, {"0", "x2", "0"}, {"0", "0", "x3"}},
                  Variance::Contravariant));
}

Embedding plane_embedding(const Chart& ambient) {
  const Chart params =
      make_chart({"u1", "u2"}, {{1.0, 2.0}, {2.5, 3.5}});
  std::vector<Expr> comps = {parse_expression("u1", params.coords),
                             parse_expression("u2", params.coords),
                             parse_expression("4.5", params.coords)};
  return Embedding::build(ambient, params, comps);
}

Embedding tilted_embedding(const Chart& ambient) {
  const Chart params =
      make_chart({"u1", "u2"}, {{1.0, 2.0}, {2.5, 3.5}});
  std::vector<Expr> comps = {parse_expression("u1", params.coords),
                             parse_expression("u2", params.coords),
                             parse_expression("u1 + u2", params.coords)};
  return Embedding::build(ambient, params, comps);
}

RunContext param_ctx_for(const Embedding& emb, const Pencil& pencil,
                         int count = 40) {
  RunContext ctx;
  ctx.tolerance = 1e-8;
  ctx.seed = 42;
  std::vector<const MetricField*> metrics = {&pencil.g().contra,
                                             &pencil.gt().contra};
  ctx.points = sample_points(emb.params(), count, 42, emb.admission(metrics));
  return ctx;
}

}  // namespace

TEST_CASE("pullback metrics") {
  // linear subspace of a flat space keeps constant coefficients
  const Chart amb = make_chart({"x1", "x2", "x3"},
                               {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}});
  const MetricField flat = make_metric(
      amb, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}},
      Variance::Covariant);
  const Chart line = make_chart({"u1"}, {{0.0, 1.0}});
  const Embedding diag = Embedding::build(
      amb, line,
      {parse_expression("u1", line.coords), parse_expression("2*u1", line.coords),
       parse_expression("0.5", line.coords)});
  const MetricField induced = pullback_metric(flat, diag);
  CHECK(close(induced.mat.at(0, 0).evaluate(Point{0.3}), 5.0, 1e-14));
}

TEST_CASE("pullback of the flat plane to the unit circle") {
  const Chart plane = make_chart({"x1", "x2"}, {{-2.0, 2.0}, {-2.0, 2.0}});
  const MetricField id =
      make_metric(plane, {{"1", "0"}, {"0", "1"}}, Variance::Covariant);
  const Chart arc = make_chart({"u1"}, {{0.2, 1.2}});
  const Embedding circle = Embedding::build(
      plane, arc,
      {parse_expression("cos(u1)", arc.coords),
       parse_expression("sin(u1)", arc.coords)});
  const MetricField induced = pullback_metric(id, circle);
  for (double u = 0.25; u < 1.2; u += 0.17)
    CHECK(close(induced.mat.at(0, 0).evaluate(Point{u}), 1.0, 1e-12));
}

TEST_CASE("pullback of a graph metric matches the jacobian contraction") {
  const Chart amb = make_chart({"x1", "x2", "x3"},
                               {{0.5, 1.5}, {0.5, 1.5}, {0.0, 3.0}});
  const MetricField flat = make_metric(
      amb, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}},
      Variance::Covariant);
  const Chart params = make_chart({"u1", "u2"}, {{0.5, 1.5}, {0.5, 1.5}});
  const Embedding graph = Embedding::build(
      amb, params,
      {parse_expression("u1", params.coords),
       parse_expression("u2", params.coords),
       parse_expression("u1*u2", params.coords)});
  const MetricField induced = pullback_metric(flat, graph);
  const Point u{0.8, 1.1};
  CHECK(close(induced.mat.at(0, 0).evaluate(u), 1.0 + 1.1 * 1.1, 1e-13));
  CHECK(close(induced.mat.at(0, 1).evaluate(u), 0.8 * 1.1, 1e-13));
  CHECK(close(induced.mat.at(1, 1).evaluate(u), 1.0 + 0.8 * 0.8, 1e-13));
}

TEST_CASE("pencil members restrict consistently on distinguished surfaces") {
  // h + lambda ht equals the pullback of g_lambda; needs both orthogonal
  // complements to coincide, so it is a distinguished-only identity
  const Pencil pair = semisimple3_pair();
  const Embedding plane = plane_embedding(pair.chart());
  RunContext pctx = param_ctx_for(plane, pair);
  const Pencil induced_pair = induced_pencil(pair, plane, pctx.points);
  for (double lambda : induced_pair.lambdas()) {
    const MetricGeometry& geo = induced_pair.lambda_geometry(lambda);
    const MetricGeometry& amb_geo = pair.lambda_geometry(lambda);
    const MetricField hl = pullback_metric(amb_geo.cov, plane);
    for (const auto& u2 : pctx.points) {
      const Eigen::MatrixXd lhs = eval_matrix(geo.cov.mat, u2);
      const Eigen::MatrixXd rhs = eval_matrix(hl.mat, u2);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <
            1e-10 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("distinguished submanifolds") {
  const Pencil pair = semisimple3_pair();

  // identity-like: any submanifold of an A = id pair is distinguished
  const Chart amb2 = make_chart({"x1", "x2"}, {{1.0, 2.0}, {1.0, 2.0}});
  const MetricField g2 =
      make_metric(amb2, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant);
  const Pencil same = Pencil::build(amb2, g2, g2);
  const Chart line = make_chart({"u1"}, {{1.05, 1.95}});
  const Embedding tilted2 = Embedding::build(
      amb2, line,
      {parse_expression("u1", line.coords),
       parse_expression("1 + 0.3*u1", line.coords)});
  RunContext lctx = param_ctx_for(tilted2, same);
  CHECK(check_distinguished(same, tilted2, lctx).passed());

  // coordinate plane of the diagonal pair
  const Embedding plane = plane_embedding(pair.chart());
  RunContext pctx = param_ctx_for(plane, pair);
  const CheckReport good = check_distinguished(pair, plane, pctx);
  CHECK(good.passed());

  // tilted plane mixes eigenspaces with distinct eigenvalues
  const Embedding tilted = tilted_embedding(pair.chart());
  RunContext tctx = param_ctx_for(tilted, pair);
  const CheckReport bad = check_distinguished(pair, tilted, tctx);
  CHECK(!bad.passed());
  REQUIRE(!bad.witnesses.empty());
}

TEST_CASE("second fundamental form differences") {
  const Pencil pair = semisimple3_pair();
  const Embedding plane = plane_embedding(pair.chart());
  RunContext pctx = param_ctx_for(plane, pair);

  // annihilator property: the difference kills every tangent column
  for (const auto& u : pctx.points) {
    const Eigen::MatrixXd j = eval_matrix(plane.jacobian(), u);
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) {
        const Eigen::VectorXd s =
            second_ff_difference(pair, plane, u, a, c, 1e-8);
        const Eigen::VectorXd pairing = j.transpose() * s;
        CHECK(pairing.cwiseAbs().maxCoeff() < 1e-12);
      }
  }

  // equal metrics: the difference vanishes
  const Chart amb2 = make_chart({"x1", "x2"}, {{1.0, 2.0}, {1.0, 2.0}});
  const MetricField g2 =
      make_metric(amb2, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant);
  const Pencil same = Pencil::build(amb2, g2, g2);
  const Chart line = make_chart({"u1"}, {{1.05, 1.95}});
  const Embedding curve = Embedding::build(
      amb2, line,
      {parse_expression("u1", line.coords),
       parse_expression("1 + 0.3*u1^2", line.coords)});
  RunContext lctx = param_ctx_for(curve, same);
  for (const auto& u : lctx.points) {
    const Eigen::VectorXd s = second_ff_difference(same, curve, u, 0, 0, 1e-8);
    CHECK(s.cwiseAbs().maxCoeff() < 1e-13);
  }

  // non-distinguished points refuse to produce a value
  const Embedding tilted = tilted_embedding(pair.chart());
  RunContext tctx = param_ctx_for(tilted, pair);
  CHECK_THROWS_AS(
      second_ff_difference(pair, tilted, tctx.points.front(), 0, 0, 1e-8),
      Error);
}

TEST_CASE("projector properties at sample points") {
  const Pencil pair = semisimple3_pair();
  const Embedding plane = plane_embedding(pair.chart());
  RunContext pctx = param_ctx_for(plane, pair);
  for (const auto& u : pctx.points) {
    const Point x = plane.ambient_point(u);
    const Eigen::MatrixXd j = eval_matrix(plane.jacobian(), u);
    const Eigen::MatrixXd gt = eval_matrix(pair.gt().cov.mat, x);
    const Eigen::MatrixXd ht = j.transpose() * gt * j;
    const Eigen::MatrixXd tangential = j * ht.inverse() * j.transpose() * gt;
    const Eigen::MatrixXd p_normal =
        Eigen::MatrixXd::Identity(3, 3) - tangential;
    CHECK((p_normal * p_normal - p_normal).cwiseAbs().maxCoeff() < 1e-10);
    // self-adjoint with respect to gt
    const Eigen::MatrixXd sym = gt * p_normal;
    CHECK((sym - sym.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("induced compatibility: criterion versus direct check") {
  const Pencil pair = semisimple3_pair();
  const Embedding plane = plane_embedding(pair.chart());
  RunContext pctx = param_ctx_for(plane, pair);
  RunContext actx = make_ctx(pair.chart(), &pair);

  const CheckReport dist = check_distinguished(pair, plane, pctx);
  const CheckReport almost = check_almost_compatible(pair, actx);
  const CheckReport compat = check_compatible(pair, actx, almost);
  REQUIRE(dist.passed());
  REQUIRE(compat.passed());

  const CheckReport report =
      check_induced_compatibility(pair, plane, pctx, dist, compat);
  CHECK(report.passed());
  CHECK(!report.inconsistent);
  REQUIRE(report.sub_verdicts.size() == 3);
  for (const auto& sub : report.sub_verdicts)
    CHECK(sub.verdict == Verdict::Pass);

  // guard paths: non-distinguished and non-compatible inputs are refused
  const Embedding tilted = tilted_embedding(pair.chart());
  RunContext tctx = param_ctx_for(tilted, pair);
  const CheckReport bad_dist = check_distinguished(pair, tilted, tctx);
  CHECK_THROWS_AS(
      check_induced_compatibility(pair, tilted, tctx, bad_dist, compat),
      Error);
}

TEST_CASE("product-closed surfaces of the idempotent structure") {
  const FMan idem = idempotent3_structure();
  RunContext actx = make_ctx(idem.chart());

  const Chart params = make_chart({"u1", "u2"}, {{1.0, 2.0}, {4.0, 5.0}});
  const Embedding good = Embedding::build(
      idem.chart(), params,
      {parse_expression("u1", params.coords),
       parse_expression("u1", params.coords),
       parse_expression("u2", params.coords)});
  RunContext gctx;
  gctx.tolerance = 1e-8;
  gctx.seed = 42;
  gctx.points = sample_points(params, 40, 42, good.admission({}));

  const CheckReport alg = check_algebra(idem, actx);
  const CheckReport inv = check_invariant_metric(idem, actx);
  const CheckReport weak = check_weak_f_condition(idem, actx, alg, inv);
  REQUIRE(weak.passed());

  const CheckReport pass =
      check_fman_submanifold(idem, good, actx, gctx, weak);
  CHECK(pass.passed());

  // shifted surface: closure of the product survives, the Euler direction
  // leaves the tangent planes
  const Embedding broken = Embedding::build(
      idem.chart(), params,
      {parse_expression("u1 + 0.7", params.coords),
       parse_expression("u1", params.coords),
       parse_expression("u2", params.coords)});
  const CheckReport fail =
      check_fman_submanifold(idem, broken, actx, gctx, weak);
  CHECK(!fail.passed());
  bool euler_fail = false, product_fail = false;
  for (const auto& sub : fail.sub_verdicts) {
    if (sub.name == "euler-closure" && sub.verdict == Verdict::Fail)
      euler_fail = true;
    if (sub.name == "product-closure" && sub.verdict == Verdict::Fail)
      product_fail = true;
  }
  CHECK(euler_fail);
  CHECK(!product_fail);
  REQUIRE(!fail.witnesses.empty());
}

TEST_CASE("rank-deficient embeddings are rejected") {
  const Chart amb = make_chart({"x1", "x2", "x3"},
                               {{-1.0, 2.0}, {-1.0, 2.0}, {-1.0, 2.0}});
  const Chart params = make_chart({"u1", "u2"}, {{-1.0, 1.0}, {-1.0, 1.0}});
  // second column of the jacobian vanishes on the plane u2 = 0
  const Embedding emb = Embedding::build(
      amb, params,
      {parse_expression("u1", params.coords),
       parse_expression("u2^2", params.coords),
       parse_expression("0", params.coords)});
  const MetricField g = make_metric(
      amb, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}},
      Variance::Contravariant);
  const Pencil pair = Pencil::build(amb, g, g);
  // admission filters the degenerate locus away
  RunContext ctx;
  ctx.points = sample_points(params, 30, 42,
                             emb.admission({&pair.g().contra}));
  for (const auto& u : ctx.points) CHECK(std::fabs(u[1]) > 1e-6);
}
