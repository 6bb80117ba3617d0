#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/pencil.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pencilkit;
using namespace pencilkit::testing;

TEST_CASE("endomorphism of a pair") {
  // identical metrics give the identity
  const Chart c = make_chart({"x1", "x2"}, {{1.0, 2.0}, {1.0, 2.0}});
  const MetricField g =
      make_metric(c, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant);
  const Pencil trivial = Pencil::build(c, g, g);
  CHECK(trivial.endomorphism().at(0, 0).is_one());
  CHECK(trivial.endomorphism().at(0, 1).is_zero());

  const Pencil diag = semisimple_pair();
  const Point p{1.25, 1.75};
  CHECK(close(diag.endomorphism().at(0, 0).evaluate(p), 1.25, 1e-14));
  CHECK(close(diag.endomorphism().at(1, 1).evaluate(p), 1.75, 1e-14));

  // conformal factor: A is the factor times the identity
  const Pencil conf = conformal_pair();
  const Point q{0.8, 1.1};
  const double factor = std::exp(0.8 * 1.1);
  CHECK(close(conf.endomorphism().at(0, 0).evaluate(q), factor, 1e-12));
  CHECK(close(conf.endomorphism().at(1, 1).evaluate(q), factor, 1e-12));
  CHECK(std::fabs(conf.endomorphism().at(0, 1).evaluate(q)) < 1e-14);
}

TEST_CASE("nijenhuis tensor against the bracket-definition oracle") {
  const Chart c = make_chart({"x1", "x2"}, {{1.0, 2.0}, {1.0, 2.0}});

  // identity endomorphism
  ExprMatrix id = ExprMatrix::identity(2);
  for (const auto& e : nijenhuis(id).m) CHECK(e.is_zero());

  // scalar multiples of the identity vanish at samples
  ExprMatrix scalar(2, 2);
  scalar.at(0, 0) = parse_expression("exp(x1*x2)", c.coords);
  scalar.at(1, 1) = parse_expression("exp(x1*x2)", c.coords);
  scalar.at(0, 1) = Expr::constant(0.0);
  scalar.at(1, 0) = Expr::constant(0.0);
  const ExprT3 n_scalar = nijenhuis(scalar);
  const auto pts = sample_points(c, 30, 42);
  for (const auto& p : pts)
    for (const auto& e : n_scalar.m) CHECK(std::fabs(e.evaluate(p)) < 1e-9);

  // crossed diagonal dependence: nonzero, and equal to the oracle
  ExprMatrix crossed(2, 2);
  crossed.at(0, 0) = parse_expression("x2", c.coords);
  crossed.at(1, 1) = parse_expression("x1", c.coords);
  const ExprT3 n_crossed = nijenhuis(crossed);
  double biggest = 0.0;
  for (const auto& p : pts) {
    const NumT3 sym = eval_t3(n_crossed, p);
    const NumT3 oracle = fd_nijenhuis(crossed, p);
    for (size_t i = 0; i < sym.m.size(); ++i) {
      CHECK(close(sym.m[i], oracle.m[i], 1e-5));
      biggest = std::max(biggest, std::fabs(sym.m[i]));
    }
  }
  CHECK(biggest > 0.1);

  // a dense endomorphism exercises every term of the formula
  ExprMatrix dense(2, 2);
  dense.at(0, 0) = parse_expression("x1 + x2^2", c.coords);
  dense.at(0, 1) = parse_expression("sin(x1)", c.coords);
  dense.at(1, 0) = parse_expression("x1*x2", c.coords);
  dense.at(1, 1) = parse_expression("exp(x2/2)", c.coords);
  const ExprT3 n_dense = nijenhuis(dense);
  for (const auto& p : pts) {
    const NumT3 sym = eval_t3(n_dense, p);
    const NumT3 oracle = fd_nijenhuis(dense, p);
    for (size_t i = 0; i < sym.m.size(); ++i)
      CHECK(close(sym.m[i], oracle.m[i], 1e-5));
    // antisymmetry in the lower pair
    for (int k = 0; k < 2; ++k)
      CHECK(sym.at(k, 0, 1) == -sym.at(k, 1, 0));
  }
}

TEST_CASE("almost compatibility: two routes agree on the corpus pairs") {
  struct Case {
    Pencil pencil;
    bool expected;
  };
  const std::vector<Case> cases = {{constant_pair(), true},
                                   {semisimple_pair(), true},
                                   {conformal_pair(), true},
                                   {crossed_pair(), false},
                                   {sphere_euclid_pair(), false}};
  for (const auto& item : cases) {
    const RunContext ctx = make_ctx(item.pencil.chart(), &item.pencil);
    const CheckReport report = check_almost_compatible(item.pencil, ctx);
    CHECK(report.passed() == item.expected);
    CHECK(!report.inconsistent);
    REQUIRE(report.sub_verdicts.size() == 2);
    CHECK((report.sub_verdicts[0].verdict == Verdict::Pass) == item.expected);
    CHECK((report.sub_verdicts[1].verdict == Verdict::Pass) == item.expected);
    if (item.expected) CHECK(report.residual < 1e-10);
    if (!item.expected) {
      REQUIRE(!report.witnesses.empty());
      CHECK(!report.witnesses.front().point.empty());
    }
  }
}

TEST_CASE("constant pair residuals sit at machine precision") {
  const Pencil pencil = constant_pair();
  const RunContext ctx = make_ctx(pencil.chart(), &pencil);
  const CheckReport report = check_almost_compatible(pencil, ctx);
  CHECK(report.passed());
  CHECK(report.residual <= 1e-12);
}

TEST_CASE("contorsion field") {
  // equal metrics and constant pairs have no contorsion
  const Pencil constant = constant_pair();
  for (const auto& e : constant.contorsion().m) CHECK(e.is_zero());

  // polar-style pair: the contorsion is the difference of the two
  // connection fields
  const Chart c = make_chart({"x1", "x2"}, {{1.0, 2.0}, {0.3, 1.2}});
  const MetricField polar_cov =
      make_metric(c, {{"1", "0"}, {"0", "x1^2"}}, Variance::Covariant);
  const MetricField flat =
      make_metric(c, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant);
  const Pencil pair = Pencil::build(c, invert_metric(polar_cov), flat);
  const ConnectionField cp = christoffel(polar_cov);
  const Point p{1.4, 0.9};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(close(pair.contorsion().at(k, i, j).evaluate(p),
                    cp.gamma.at(k, i, j).evaluate(p), 1e-13));
}

TEST_CASE("compatibility: three routes agree, pass and fail") {
  const Pencil semisimple = semisimple_pair();
  RunContext ctx = make_ctx(semisimple.chart(), &semisimple);
  const CheckReport almost = check_almost_compatible(semisimple, ctx);
  const CheckReport compat = check_compatible(semisimple, ctx, almost);
  CHECK(compat.passed());
  CHECK(compat.residual <= 1e-8);
  CHECK(!compat.inconsistent);

  const Pencil conformal = conformal_pair();
  RunContext cctx = make_ctx(conformal.chart(), &conformal);
  const CheckReport calmost = check_almost_compatible(conformal, cctx);
  REQUIRE(calmost.passed());
  const CheckReport ccompat = check_compatible(conformal, cctx, calmost);
  CHECK(!ccompat.passed());
  CHECK(!ccompat.inconsistent);  // all three routes fail together
  for (const auto& sub : ccompat.sub_verdicts)
    CHECK(sub.verdict == Verdict::Fail);
}

TEST_CASE("compatibility refuses non-almost-compatible input") {
  const Pencil crossed = crossed_pair();
  RunContext ctx = make_ctx(crossed.chart(), &crossed);
  const CheckReport almost = check_almost_compatible(crossed, ctx);
  REQUIRE(!almost.passed());
  CHECK_THROWS_AS(check_compatible(crossed, ctx, almost), Error);
  CHECK_THROWS_AS(check_prop_au(crossed, ctx, almost), Error);
  try {
    check_compatible(crossed, ctx, almost);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::PreconditionFailed);
  }
}

TEST_CASE("cross-metric exchange identity") {
  for (const Pencil& pencil : {constant_pair(), semisimple_pair(),
                               conformal_pair()}) {
    RunContext ctx = make_ctx(pencil.chart(), &pencil);
    const CheckReport almost = check_almost_compatible(pencil, ctx);
    REQUIRE(almost.passed());
    const CheckReport report = check_prop_au(pencil, ctx, almost);
    CHECK(report.passed());
    CHECK(report.residual <= 1e-8);
  }
}

TEST_CASE("flat pencil check") {
  const Pencil constant = constant_pair();
  RunContext ctx = make_ctx(constant.chart(), &constant);
  CHECK(check_flat_pencil(constant, ctx).passed());

  const Pencil semisimple = semisimple_pair();
  RunContext sctx = make_ctx(semisimple.chart(), &semisimple);
  CHECK(check_flat_pencil(semisimple, sctx).passed());

  const Pencil sphere = sphere_euclid_pair();
  RunContext pctx = make_ctx(sphere.chart(), &sphere);
  const CheckReport report = check_flat_pencil(sphere, pctx);
  CHECK(!report.passed());
  REQUIRE(!report.witnesses.empty());
}

TEST_CASE("pencil members are affine in the parameter") {
  const Pencil pencil = semisimple_pair();
  const auto pts = sample_points(pencil.chart(), 20, 42);
  for (double lambda : pencil.lambdas()) {
    const MetricGeometry& geo = pencil.lambda_geometry(lambda);
    for (const auto& p : pts) {
      const Eigen::MatrixXd gl = eval_matrix(geo.contra.mat, p);
      const Eigen::MatrixXd g0 = eval_matrix(pencil.g().contra.mat, p);
      const Eigen::MatrixXd g1 = eval_matrix(pencil.gt().contra.mat, p);
      CHECK((gl - g0 - lambda * g1).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("degenerate pencil members are skipped with a warning") {
  // gt = -g makes the member at lambda = 1 identically singular
  const Chart c = make_chart({"x1", "x2"}, {{1.0, 2.0}, {1.0, 2.0}});
  const MetricField g =
      make_metric(c, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant);
  const MetricField neg =
      make_metric(c, {{"-1", "0"}, {"0", "-1"}}, Variance::Contravariant);
  const Pencil pencil = Pencil::build(c, g, neg);
  RunContext ctx = make_ctx(c);
  const LambdaPlan plan = plan_lambdas(pencil, ctx.points);
  CHECK(plan.usable.size() == 4);
  REQUIRE(plan.warnings.size() == 1);
  CHECK(plan.warnings.front().find("lambda=1") != std::string::npos);

  // with a trimmed list there are not enough members left
  const Pencil short_pencil =
      Pencil::build(c, g, neg, std::vector<double>{-1.0, 0.5, 1.0});
  CHECK_THROWS_AS(plan_lambdas(short_pencil, ctx.points), Error);
}

TEST_CASE("eigenvalue separation") {
  const Pencil semisimple = semisimple_pair();
  RunContext ctx = make_ctx(semisimple.chart(), &semisimple);
  const CheckReport good = check_semisimple(semisimple, ctx);
  CHECK(good.passed());
  CHECK(good.residual > 1e-2);  // the gap, not a defect

  // scalar endomorphism: all eigenvalues collide
  const Pencil conformal = conformal_pair();
  RunContext cctx = make_ctx(conformal.chart(), &conformal);
  const CheckReport bad = check_semisimple(conformal, cctx);
  CHECK(!bad.passed());

  // oracle for the 2x2 case: roots of the characteristic polynomial
  const Point p{1.3, 1.8};
  const Eigen::MatrixXd a = eval_matrix(semisimple.endomorphism(), p);
  const double tr = a.trace(), det = a.determinant();
  const double disc = std::sqrt(tr * tr - 4.0 * det);
  const double lo = (tr - disc) / 2.0, hi = (tr + disc) / 2.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
  std::vector<double> eig = {solver.eigenvalues()(0).real(),
                             solver.eigenvalues()(1).real()};
  std::sort(eig.begin(), eig.end());
  CHECK(close(eig[0], lo, 1e-12));
  CHECK(close(eig[1], hi, 1e-12));
}

TEST_CASE("semisimple almost compatible pairs are compatible") {
  // the upgrade holds on every corpus pair that passes both gates
  for (const Pencil& pencil : {constant_pair(), semisimple_pair()}) {
    RunContext ctx = make_ctx(pencil.chart(), &pencil);
    const CheckReport ss = check_semisimple(pencil, ctx);
    const CheckReport almost = check_almost_compatible(pencil, ctx);
    if (!ss.passed() || !almost.passed()) continue;
    const CheckReport compat = check_compatible(pencil, ctx, almost);
    CHECK(compat.passed());
  }
}
