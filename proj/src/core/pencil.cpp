#include "core/pencil.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace pencilkit {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

double maxabs(const Eigen::MatrixXd& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

double maxabs(const NumT3& t) {
  double m = 0.0;
  for (double v : t.m) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

MetricGeometry make_metric_geometry(const MetricField& contra) {
  if (contra.variance != Variance::Contravariant)
    throw Error(ErrorCode::Internal,
                "pencil metrics are stored contravariantly");
  MetricGeometry geo;
  geo.contra = contra;
  geo.det_contra = determinant(contra.mat).simplified();
  geo.cov = invert_metric(contra);
  geo.det_cov = determinant(geo.cov.mat).simplified();
  geo.conn = christoffel(geo.cov);
  geo.curv = riemann(geo.conn);
  return geo;
}

MetricGeometry make_metric_geometry_from_cov(const MetricField& cov) {
  if (cov.variance != Variance::Covariant)
    throw Error(ErrorCode::Internal, "expected a covariant metric");
  MetricGeometry geo;
  geo.cov = cov;
  geo.det_cov = determinant(cov.mat).simplified();
  geo.contra = invert_metric(cov);
  geo.det_contra = determinant(geo.contra.mat).simplified();
  geo.conn = christoffel(geo.cov);
  geo.curv = riemann(geo.conn);
  return geo;
}

Pencil Pencil::build(Chart chart, MetricField g_contra, MetricField gt_contra,
                     std::vector<double> lambdas) {
  chart.validate();
  if (chart.dim() > 4)
    throw Error(ErrorCode::DimensionCap, "charts are capped at dimension 4");
  if (g_contra.mat.rows != chart.dim() || gt_contra.mat.rows != chart.dim())
    throw Error(ErrorCode::ConfigError, "metric dimension does not match chart");
  if (lambdas.size() < 3)
    throw Error(ErrorCode::ConfigError, "need at least 3 lambda samples");

  Pencil p;
  p.chart_ = chart;
  p.lambdas_ = std::move(lambdas);
  g_contra.chart = chart;
  gt_contra.chart = chart;
  p.g_ = make_metric_geometry(g_contra);
  p.gt_ = make_metric_geometry(gt_contra);

  const int n = chart.dim();
  p.contorsion_ = ExprT3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        p.contorsion_.at(k, i, j) =
            (p.g_.conn.gamma.at(k, i, j) - p.gt_.conn.gamma.at(k, i, j))
                .simplified();

  p.a_ = matmul(p.gt_.contra.mat, p.g_.cov.mat);
  for (auto& e : p.a_.m) e = e.simplified();
  return p;
}

const MetricGeometry& Pencil::lambda_geometry(double lambda) const {
  auto it = lambda_cache_.find(lambda);
  if (it != lambda_cache_.end()) return *it->second;
  const int n = chart_.dim();
  MetricField pm;
  pm.chart = chart_;
  pm.variance = Variance::Contravariant;
  pm.mat = ExprMatrix(n, n);
  const Expr l = Expr::constant(lambda);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pm.mat.at(i, j) =
          (g_.contra.mat.at(i, j) + l * gt_.contra.mat.at(i, j)).simplified();
  auto geo = std::make_shared<MetricGeometry>(make_metric_geometry(pm));
  auto [pos, inserted] = lambda_cache_.emplace(lambda, std::move(geo));
  return *pos->second;
}

std::vector<AdmissionPredicate> Pencil::admission() const {
  return {det_floor_predicate(g_.contra), det_floor_predicate(gt_.contra)};
}

double Pencil::lambda_det(double lambda, const Point& p) const {
  const int n = chart_.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = g_.contra.mat.at(i, j).evaluate(p) +
                lambda * gt_.contra.mat.at(i, j).evaluate(p);
  return std::fabs(m.determinant());
}

ExprT3 nijenhuis(const ExprMatrix& a) {
  const int n = a.rows;
  // dA(s, k, j) = d_s A^k_j
  ExprT3 da(n);
  for (int s = 0; s < n; ++s)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) da.at(s, k, j) = a.at(k, j).derivative(s);

  ExprT3 out(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Expr value;
        for (int s = 0; s < n; ++s) {
          value = value - a.at(s, i) * da.at(s, k, j) +
                  a.at(s, j) * da.at(s, k, i) +
                  a.at(k, s) * (da.at(i, s, j) - da.at(j, s, i));
        }
        value = value.simplified();
        out.at(k, i, j) = value;
        out.at(k, j, i) = -value;
      }
  return out;
}

LambdaPlan plan_lambdas(const Pencil& pencil,
                        const std::vector<Point>& points) {
  LambdaPlan plan;
  for (double lambda : pencil.lambdas()) {
    bool singular = false;
    Point where;
    for (const auto& p : points) {
      if (pencil.lambda_det(lambda, p) <= kDetFloor) {
        singular = true;
        where = p;
        break;
      }
    }
    if (singular) {
      plan.warnings.push_back("lambda=" + fmt(lambda) +
                              " skipped: pencil metric degenerates at an "
                              "admitted sample point");
    } else {
      plan.usable.push_back(lambda);
    }
  }
  if (plan.usable.size() < 3)
    throw Error(ErrorCode::SingularPencil,
                "fewer than 3 usable lambda samples remain for this pencil");
  return plan;
}

CheckReport check_almost_compatible(const Pencil& pencil,
                                    const RunContext& ctx) {
  const int n = pencil.chart().dim();
  const LambdaPlan plan = plan_lambdas(pencil, ctx.points);

  // (a) connection-pencil identity at the lambda samples
  ResidualTracker ra;
  for (double lambda : plan.usable) {
    const MetricGeometry& geo = pencil.lambda_geometry(lambda);
    for (const auto& p : ctx.points) {
      const Eigen::MatrixXd gl = eval_matrix(geo.contra.mat, p);
      const Eigen::MatrixXd g0 = eval_matrix(pencil.g().contra.mat, p);
      const Eigen::MatrixXd g1 = eval_matrix(pencil.gt().contra.mat, p);
      const NumT3 cl = eval_t3(geo.conn.gamma, p);
      const NumT3 c0 = eval_t3(pencil.g().conn.gamma, p);
      const NumT3 c1 = eval_t3(pencil.gt().conn.gamma, p);
      for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
          for (int m = 0; m < n; ++m) {
            double tl = 0.0, t0 = 0.0, t1 = 0.0;
            for (int s = 0; s < n; ++s) {
              tl -= gl(m, s) * cl.at(a, i, s);
              t0 -= g0(m, s) * c0.at(a, i, s);
              t1 -= g1(m, s) * c1.at(a, i, s);
            }
            const double scale = std::max(
                {std::fabs(tl), std::fabs(t0), std::fabs(lambda * t1)});
            ra.add(tl - t0 - lambda * t1, scale, p,
                   "lambda=" + fmt(lambda) + " alpha=dx" + std::to_string(a + 1) +
                       " X=d" + std::to_string(i + 1) + " comp=" +
                       std::to_string(m + 1));
          }
    }
  }

  // (b) Nijenhuis tensor of A
  ResidualTracker rb;
  const ExprT3 nij = nijenhuis(pencil.endomorphism());
  ExprT3 da(n);
  for (int s = 0; s < n; ++s)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        da.at(s, k, j) = pencil.endomorphism().at(k, j).derivative(s);
  for (const auto& p : ctx.points) {
    const NumT3 nv = eval_t3(nij, p);
    const double scale = maxabs(eval_matrix(pencil.endomorphism(), p)) *
                         maxabs(eval_t3(da, p));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          rb.add(nv.at(k, i, j), scale, p,
                 "N^" + std::to_string(k + 1) + "_" + std::to_string(i + 1) +
                     std::to_string(j + 1));
  }

  std::vector<SubVerdict> subs{ra.sub("connection-pencil", ctx.tolerance),
                               rb.sub("nijenhuis", ctx.tolerance)};
  std::vector<Witness> wit;
  if (ra.max() > ctx.tolerance) wit.push_back(ra.worst());
  if (rb.max() > ctx.tolerance) wit.push_back(rb.worst());
  if (wit.empty()) wit.push_back(ra.worst());

  CheckReport report =
      combine_subs("almost_compatible", std::move(subs), std::move(wit));
  report.lambdas_used = plan.usable;
  report.notes = plan.warnings;
  const bool pa = ra.max() <= ctx.tolerance;
  const bool pb = rb.max() <= ctx.tolerance;
  if (pa != pb) {
    report.inconsistent = true;
    report.notes.push_back(
        "equivalent routes disagree (connection-pencil vs nijenhuis); this "
        "indicates a library defect");
  }
  return report;
}

namespace {

[[noreturn]] void precondition_failure(const char* check) {
  throw Error(ErrorCode::PreconditionFailed,
              std::string(check) +
                  " requires an almost compatible pair; run "
                  "almost_compatible first");
}

}  // namespace

CheckReport check_compatible(const Pencil& pencil, const RunContext& ctx,
                             const CheckReport& almost) {
  if (!almost.passed()) precondition_failure("compatible");
  const int n = pencil.chart().dim();
  const LambdaPlan plan = plan_lambdas(pencil, ctx.points);

  // (1) curvature-pencil identity.  The scale includes the largest term of
  // the curvature expansion (products of the contravariant metric with
  // Gamma-quadratics), so points where a pencil member grazes a degeneracy
  // do not turn pure cancellation noise into a verdict.
  ResidualTracker r1;
  for (double lambda : plan.usable) {
    const MetricGeometry& geo = pencil.lambda_geometry(lambda);
    for (const auto& p : ctx.points) {
      const Eigen::MatrixXd gl = eval_matrix(geo.contra.mat, p);
      const Eigen::MatrixXd g0 = eval_matrix(pencil.g().contra.mat, p);
      const Eigen::MatrixXd g1 = eval_matrix(pencil.gt().contra.mat, p);
      const NumT4 rl = eval_t4(geo.curv.riem, p);
      const NumT4 r0 = eval_t4(pencil.g().curv.riem, p);
      const NumT4 rt = eval_t4(pencil.gt().curv.riem, p);
      const double cl = maxabs(eval_t3(geo.conn.gamma, p));
      const double c0 = maxabs(eval_t3(pencil.g().conn.gamma, p));
      const double c1 = maxabs(eval_t3(pencil.gt().conn.gamma, p));
      const double expansion =
          std::max({maxabs(gl) * (cl * cl + cl), maxabs(g0) * (c0 * c0 + c0),
                    std::fabs(lambda) * maxabs(g1) * (c1 * c1 + c1)});
      for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            for (int m = 0; m < n; ++m) {
              double tl = 0.0, t0 = 0.0, t1 = 0.0;
              for (int k = 0; k < n; ++k) {
                tl -= gl(m, k) * rl.at(a, k, i, j);
                t0 -= g0(m, k) * r0.at(a, k, i, j);
                t1 -= g1(m, k) * rt.at(a, k, i, j);
              }
              const double scale =
                  std::max({std::fabs(tl), std::fabs(t0),
                            std::fabs(lambda * t1), expansion});
              r1.add(tl - t0 - lambda * t1, scale, p,
                     "lambda=" + fmt(lambda) + " alpha=dx" +
                         std::to_string(a + 1) + " plane=(" +
                         std::to_string(i + 1) + "," + std::to_string(j + 1) +
                         ") comp=" + std::to_string(m + 1));
            }
    }
  }

  // (2)/(3) contorsion quadratic symmetry with each metric
  ResidualTracker r2, r3;
  for (const auto& p : ctx.points) {
    const Eigen::MatrixXd g0 = eval_matrix(pencil.g().contra.mat, p);
    const Eigen::MatrixXd g1 = eval_matrix(pencil.gt().contra.mat, p);
    const NumT3 k = eval_t3(pencil.contorsion(), p);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int pp = 0; pp < n; ++pp)
          for (int q = pp + 1; q < n; ++q) {
            double lhs0 = 0.0, rhs0 = 0.0, lhs1 = 0.0, rhs1 = 0.0;
            for (int jj = 0; jj < n; ++jj)
              for (int ll = 0; ll < n; ++ll) {
                lhs0 += g0(jj, ll) * k.at(a, q, jj) * k.at(b, pp, ll);
                rhs0 += g0(jj, ll) * k.at(a, pp, jj) * k.at(b, q, ll);
                lhs1 += g1(jj, ll) * k.at(a, q, jj) * k.at(b, pp, ll);
                rhs1 += g1(jj, ll) * k.at(a, pp, jj) * k.at(b, q, ll);
              }
            const std::string where = "alpha=dx" + std::to_string(a + 1) +
                                      " beta=dx" + std::to_string(b + 1) +
                                      " X=d" + std::to_string(pp + 1) +
                                      " Y=d" + std::to_string(q + 1);
            r2.add(lhs0 - rhs0, std::max(std::fabs(lhs0), std::fabs(rhs0)), p,
                   where);
            r3.add(lhs1 - rhs1, std::max(std::fabs(lhs1), std::fabs(rhs1)), p,
                   where);
          }
  }

  std::vector<SubVerdict> subs{r1.sub("curvature-pencil", ctx.tolerance),
                               r2.sub("contorsion-symmetry-g", ctx.tolerance),
                               r3.sub("contorsion-symmetry-gt", ctx.tolerance)};
  std::vector<Witness> wit;
  for (const ResidualTracker* t : {&r1, &r2, &r3})
    if (t->max() > ctx.tolerance) wit.push_back(t->worst());
  if (wit.empty()) wit.push_back(r1.worst());

  CheckReport report =
      combine_subs("compatible", std::move(subs), std::move(wit));
  report.lambdas_used = plan.usable;
  report.notes = plan.warnings;
  const bool p1 = r1.max() <= ctx.tolerance;
  const bool p2 = r2.max() <= ctx.tolerance;
  const bool p3 = r3.max() <= ctx.tolerance;
  if (p1 != p2 || p2 != p3) {
    report.inconsistent = true;
    report.notes.push_back(
        "equivalent compatibility routes disagree; this indicates a library "
        "defect");
  }
  return report;
}

CheckReport check_prop_au(const Pencil& pencil, const RunContext& ctx,
                          const CheckReport& almost) {
  if (!almost.passed()) precondition_failure("prop_au");
  const int n = pencil.chart().dim();
  ResidualTracker res;
  for (const auto& p : ctx.points) {
    const Eigen::MatrixXd g0 = eval_matrix(pencil.g().contra.mat, p);
    const Eigen::MatrixXd g1 = eval_matrix(pencil.gt().contra.mat, p);
    const NumT3 k = eval_t3(pencil.contorsion(), p);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int m = 0; m < n; ++m) {
          double lhs = 0.0, rhs = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              lhs += g0(m, j) * g1(i, c) * k.at(a, i, j);
              rhs += g1(m, j) * g0(i, c) * k.at(a, i, j);
            }
          res.add(lhs - rhs, std::max(std::fabs(lhs), std::fabs(rhs)), p,
                  "alpha=dx" + std::to_string(a + 1) + " gamma=dx" +
                      std::to_string(c + 1) + " comp=" + std::to_string(m + 1));
        }
  }
  CheckReport report;
  report.check = "prop_au";
  report.sub_verdicts.push_back(res.sub("cross-metric-exchange", ctx.tolerance));
  report.residual = res.max();
  report.verdict = res.max() <= ctx.tolerance ? Verdict::Pass : Verdict::Fail;
  report.witnesses.push_back(res.worst());
  return report;
}

CheckReport check_flat_pencil(const Pencil& pencil, const RunContext& ctx) {
  const int n = pencil.chart().dim();
  const LambdaPlan plan = plan_lambdas(pencil, ctx.points);

  auto curvature_residual = [&](const MetricGeometry& geo, ResidualTracker& t,
                                const std::string& tag) {
    for (const auto& p : ctx.points) {
      const NumT4 rv = eval_t4(geo.curv.riem, p);
      const double gm = maxabs(eval_t3(geo.conn.gamma, p));
      const double scale = gm * gm + gm;
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
          for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
              t.add(rv.at(l, k, i, j), scale, p,
                    tag + " R^" + std::to_string(l + 1) + "_" +
                        std::to_string(k + 1) + std::to_string(i + 1) +
                        std::to_string(j + 1));
    }
  };

  ResidualTracker rg, rt, rl;
  curvature_residual(pencil.g(), rg, "g");
  curvature_residual(pencil.gt(), rt, "gt");
  for (double lambda : plan.usable)
    curvature_residual(pencil.lambda_geometry(lambda), rl,
                       "lambda=" + fmt(lambda));

  std::vector<SubVerdict> subs{rl.sub("pencil-curvature", ctx.tolerance),
                               rg.sub("curvature-g", ctx.tolerance),
                               rt.sub("curvature-gt", ctx.tolerance)};
  std::vector<Witness> wit;
  for (const ResidualTracker* t : {&rl, &rg, &rt})
    if (t->max() > ctx.tolerance) wit.push_back(t->worst());
  if (wit.empty()) wit.push_back(rl.worst());
  CheckReport report =
      combine_subs("flat_pencil", std::move(subs), std::move(wit));
  report.lambdas_used = plan.usable;
  report.notes = plan.warnings;
  return report;
}

CheckReport check_semisimple(const Pencil& pencil, const RunContext& ctx) {
  const int n = pencil.chart().dim();
  CheckReport report;
  report.check = "semisimple";

  double min_gap = std::numeric_limits<double>::infinity();
  double min_nij_gap = std::numeric_limits<double>::infinity();
  Witness worst;
  bool complex_seen = false;

  const ExprT3 nij = nijenhuis(pencil.endomorphism());
  for (const auto& p : ctx.points) {
    const Eigen::MatrixXd a = eval_matrix(pencil.endomorphism(), p);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
    const auto ev = solver.eigenvalues();
    for (int i = 0; i < n; ++i)
      if (std::fabs(ev(i).imag()) > 1e-9 * (1.0 + std::fabs(ev(i).real())))
        complex_seen = true;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double gap = std::abs(ev(i) - ev(j));
        if (gap < min_gap) {
          min_gap = gap;
          worst = Witness{p, "eigenvalue gap " + fmt(gap)};
        }
      }

    // literal reading: eigenvalues of the Nijenhuis tensor contracted with
    // the unit diagonal vector; identically zero for almost compatible pairs
    const NumT3 nv = eval_t3(nij, p);
    Eigen::MatrixXd nmat(n, n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) sum += nv.at(k, i, j);
        nmat(k, i) = sum;
      }
    Eigen::EigenSolver<Eigen::MatrixXd> nsolver(nmat);
    const auto nev = nsolver.eigenvalues();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        min_nij_gap = std::min(min_nij_gap, std::abs(nev(i) - nev(j)));
  }

  if (n < 2) {
    min_gap = std::numeric_limits<double>::infinity();
    report.notes.push_back("one-dimensional chart: separation is vacuous");
    report.verdict = Verdict::Pass;
    report.residual = 0.0;
    report.witnesses.push_back(Witness{ctx.points.empty() ? Point{} : ctx.points.front(), "dim 1"});
    return report;
  }

  const bool pass = !complex_seen && min_gap > kEigenGapFloor;
  report.verdict = pass ? Verdict::Pass : Verdict::Fail;
  report.residual = std::isfinite(min_gap) ? min_gap : 0.0;
  report.witnesses.push_back(worst);
  report.sub_verdicts.push_back(SubVerdict{
      "endomorphism-eigen-gap", pass ? Verdict::Pass : Verdict::Fail,
      report.residual});
  if (complex_seen)
    report.notes.push_back(
        "complex eigenvalues encountered; reported as not semi-simple");
  report.notes.push_back(
      "separation is tested on the eigenvalues of A = gt* g; the literal "
      "reading (eigenvalues of the Nijenhuis tensor, here contracted with the "
      "unit diagonal vector) gives min gap " +
      fmt(std::isfinite(min_nij_gap) ? min_nij_gap : 0.0) +
      " and vanishes identically for almost compatible pairs");
  report.notes.push_back("verdict threshold: gap > " + fmt(kEigenGapFloor) +
                         " at every sample");
  return report;
}

}  // namespace pencilkit
