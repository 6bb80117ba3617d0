#include "core/geometry.hpp"

#include <cmath>

namespace pencilkit {

void MetricField::verify_symmetric(const std::vector<Point>& points,
                                   double tol) const {
  for (const auto& p : points) {
    for (int i = 0; i < dim(); ++i)
      for (int j = i + 1; j < dim(); ++j) {
        const double a = mat.at(i, j).evaluate(p);
        const double b = mat.at(j, i).evaluate(p);
        if (std::fabs(a - b) > tol * (1.0 + std::fabs(a)))
          throw Error(ErrorCode::AsymmetryDetected,
                      "metric is not symmetric at a sample point", p);
      }
  }
}

MetricField invert_metric(const MetricField& m, Expr* det_out) {
  MetricField out;
  out.chart = m.chart;
  out.mat = adjugate_inverse(m.mat, det_out);
  out.variance = m.variance == Variance::Covariant ? Variance::Contravariant
                                                   : Variance::Covariant;
  return out;
}

AdmissionPredicate det_floor_predicate(const MetricField& m) {
  const Expr det = determinant(m.mat).simplified();
  return [det](const Point& p) {
    try {
      return std::fabs(det.evaluate(p)) > kDetFloor;
    } catch (const Error&) {
      return false;
    }
  };
}

void verify_invertible(const MetricField& m, const std::vector<Point>& points) {
  const Expr det = determinant(m.mat).simplified();
  for (const auto& p : points) {
    if (std::fabs(det.evaluate(p)) <= kDetFloor)
      throw Error(ErrorCode::SingularMetric,
                  "metric determinant vanishes at a sample point", p);
  }
}

ConnectionField christoffel(const MetricField& g_cov) {
  if (g_cov.variance != Variance::Covariant)
    throw Error(ErrorCode::Internal, "christoffel expects a covariant metric");
  const int n = g_cov.dim();
  const ExprMatrix inv = adjugate_inverse(g_cov.mat);

  // d_i g_jl, built once
  std::vector<ExprMatrix> dg(static_cast<size_t>(n), ExprMatrix(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        dg[static_cast<size_t>(i)].at(j, l) = g_cov.mat.at(j, l).derivative(i);

  ConnectionField conn;
  conn.chart = g_cov.chart;
  conn.gamma = ExprT3(n);
  const Expr half = Expr::constant(0.5);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Expr sum;
        for (int l = 0; l < n; ++l) {
          Expr bracket = dg[static_cast<size_t>(i)].at(j, l) +
                         dg[static_cast<size_t>(j)].at(i, l) -
                         dg[static_cast<size_t>(l)].at(i, j);
          sum = sum + inv.at(k, l) * bracket;
        }
        Expr gamma = (half * sum).simplified();
        conn.gamma.at(k, i, j) = gamma;
        conn.gamma.at(k, j, i) = gamma;
      }
  return conn;
}

CurvatureField riemann(const ConnectionField& conn) {
  const int n = conn.chart.dim();
  CurvatureField out;
  out.chart = conn.chart;
  out.riem = ExprT4(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          Expr value = conn.gamma.at(l, j, k).derivative(i) -
                       conn.gamma.at(l, i, k).derivative(j);
          for (int s = 0; s < n; ++s) {
            value = value + conn.gamma.at(l, i, s) * conn.gamma.at(s, j, k) -
                    conn.gamma.at(l, j, s) * conn.gamma.at(s, i, k);
          }
          value = value.simplified();
          out.riem.at(l, k, i, j) = value;
          out.riem.at(l, k, j, i) = -value;
        }
  return out;
}

ExprMatrix covariant_derivative_oneform(const ConnectionField& conn,
                                        const OneFormExpr& alpha) {
  const int n = conn.chart.dim();
  ExprMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr value = alpha.comps[static_cast<size_t>(j)].derivative(i);
      for (int k = 0; k < n; ++k)
        value = value - conn.gamma.at(k, i, j) * alpha.comps[static_cast<size_t>(k)];
      out.at(i, j) = value.simplified();
    }
  return out;
}

ExprMatrix covariant_derivative_vector(const ConnectionField& conn,
                                       const VectorFieldExpr& x) {
  const int n = conn.chart.dim();
  ExprMatrix out(n, n);  // out(i, j) = nabla_j X^i
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr value = x.comps[static_cast<size_t>(i)].derivative(j);
      for (int k = 0; k < n; ++k)
        value = value + conn.gamma.at(i, j, k) * x.comps[static_cast<size_t>(k)];
      out.at(i, j) = value.simplified();
    }
  return out;
}

OneFormExpr lower(const MetricField& g_cov, const VectorFieldExpr& x) {
  if (g_cov.variance != Variance::Covariant)
    throw Error(ErrorCode::Internal, "lower expects a covariant metric");
  const int n = g_cov.dim();
  OneFormExpr out;
  out.chart = g_cov.chart;
  out.comps.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Expr sum;
    for (int j = 0; j < n; ++j)
      sum = sum + g_cov.mat.at(i, j) * x.comps[static_cast<size_t>(j)];
    out.comps[static_cast<size_t>(i)] = sum.simplified();
  }
  return out;
}

VectorFieldExpr raise(const MetricField& g_contra, const OneFormExpr& alpha) {
  if (g_contra.variance != Variance::Contravariant)
    throw Error(ErrorCode::Internal, "raise expects a contravariant metric");
  const int n = g_contra.dim();
  VectorFieldExpr out;
  out.chart = g_contra.chart;
  out.comps.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Expr sum;
    for (int j = 0; j < n; ++j)
      sum = sum + g_contra.mat.at(i, j) * alpha.comps[static_cast<size_t>(j)];
    out.comps[static_cast<size_t>(i)] = sum.simplified();
  }
  return out;
}

ExprMatrix lie_derivative_metric(const VectorFieldExpr& e,
                                 const MetricField& m) {
  const int n = m.dim();
  ExprMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr value;
      for (int k = 0; k < n; ++k)
        value = value +
                e.comps[static_cast<size_t>(k)] * m.mat.at(i, j).derivative(k);
      if (m.variance == Variance::Contravariant) {
        for (int k = 0; k < n; ++k) {
          value = value - m.mat.at(k, j) * e.comps[static_cast<size_t>(i)].derivative(k);
          value = value - m.mat.at(i, k) * e.comps[static_cast<size_t>(j)].derivative(k);
        }
      } else {
        for (int k = 0; k < n; ++k) {
          value = value + m.mat.at(k, j) * e.comps[static_cast<size_t>(k)].derivative(i);
          value = value + m.mat.at(i, k) * e.comps[static_cast<size_t>(k)].derivative(j);
        }
      }
      out.at(i, j) = value.simplified();
    }
  return out;
}

VectorFieldExpr gradient(const MetricField& g_contra, const Expr& f) {
  OneFormExpr df;
  df.chart = g_contra.chart;
  for (int i = 0; i < g_contra.dim(); ++i) df.comps.push_back(f.derivative(i));
  return raise(g_contra, df);
}

CheckReport check_killing_identity(const MetricField& g_cov,
                                   const VectorFieldExpr& e, double d_const,
                                   const std::vector<Point>& points,
                                   double tol, std::uint64_t seed) {
  const int n = g_cov.dim();
  CheckReport report;
  report.check = "killing_identity";

  // Precondition: L_E(g) = D g at the sample points.
  ResidualTracker pre;
  const ExprMatrix lie = lie_derivative_metric(e, g_cov);
  for (const auto& p : points) {
    const Eigen::MatrixXd lhs = eval_matrix(lie, p);
    const Eigen::MatrixXd gv = eval_matrix(g_cov.mat, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        pre.add(lhs(i, j) - d_const * gv(i, j),
                std::max(std::fabs(lhs(i, j)), std::fabs(d_const * gv(i, j))),
                p, "lie-scaling i=" + std::to_string(i + 1) +
                       " j=" + std::to_string(j + 1));
  }
  report.sub_verdicts.push_back(pre.sub("conformal-scaling", tol));
  if (pre.max() > tol) {
    report.verdict = Verdict::PreconditionFailed;
    report.residual = pre.max();
    report.witnesses.push_back(pre.worst());
    report.notes.push_back(
        "field does not scale the metric by the stated constant; identity "
        "not evaluated");
    return report;
  }

  const ConnectionField conn = christoffel(g_cov);
  const CurvatureField curv = riemann(conn);
  const ExprMatrix w = covariant_derivative_vector(conn, e);  // w(i,j)=nabla_j E^i

  // nabla_a w^i_b = d_a w^i_b + Gamma^i_as w^s_b - Gamma^s_ab w^i_s
  ExprT3 dw(n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < n; ++b) {
        Expr value = w.at(i, b).derivative(a);
        for (int s = 0; s < n; ++s)
          value = value + conn.gamma.at(i, a, s) * w.at(s, b) -
                  conn.gamma.at(s, a, b) * w.at(i, s);
        dw.at(i, a, b) = value.simplified();
      }

  SampleRng rng(derive_seed(seed, "killing_identity"));
  ResidualTracker res;
  for (const auto& p : points) {
    const Eigen::MatrixXd gv = eval_matrix(g_cov.mat, p);
    const Eigen::VectorXd ev = eval_vector(e.comps, p);
    const NumT4 rv = eval_t4(curv.riem, p);
    const NumT3 dwv = eval_t3(dw, p);
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::VectorXd x(n), y(n), z(n);
      for (int i = 0; i < n; ++i) {
        x(i) = rng.uniform(-1.0, 1.0);
        y(i) = rng.uniform(-1.0, 1.0);
        z(i) = rng.uniform(-1.0, 1.0);
      }
      // lhs = g((nabla_X nabla E)(Y), Z)
      double lhs = 0.0;
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
              lhs += gv(i, c) * dwv.at(i, a, b) * x(a) * y(b) * z(c);
      // rhs = g(R(Y, Z) X, E)
      double rhs = 0.0;
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int m = 0; m < n; ++m)
                rhs += gv(l, m) * ev(m) * rv.at(l, k, i, j) * x(k) * y(i) * z(j);
      res.add(lhs - rhs, std::max(std::fabs(lhs), std::fabs(rhs)), p,
              "random frame trial " + std::to_string(trial + 1));
    }
  }
  report.sub_verdicts.push_back(res.sub("curvature-hessian-identity", tol));
  report.residual = res.max();
  report.verdict = res.max() <= tol ? Verdict::Pass : Verdict::Fail;
  report.witnesses.push_back(res.worst());
  return report;
}

}  // namespace pencilkit
