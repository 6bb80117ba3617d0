#include "core/submanifold.hpp"

#include <cmath>

namespace pencilkit {

namespace {

constexpr double kRankTol = 1e-8;

bool full_rank(const Eigen::MatrixXd& j) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(j);
  qr.setThreshold(kRankTol);
  return qr.rank() == j.cols();
}

// least-squares coefficients of v on the columns of j and the residual norm
std::pair<Eigen::VectorXd, double> span_fit(const Eigen::MatrixXd& j,
                                            const Eigen::VectorXd& v) {
  const Eigen::VectorXd t = j.colPivHouseholderQr().solve(v);
  const double res = (j * t - v).norm();
  return {t, res};
}

}  // namespace

Embedding Embedding::build(Chart ambient, Chart params,
                           std::vector<Expr> components) {
  ambient.validate();
  params.validate();
  if (params.dim() > ambient.dim())
    throw Error(ErrorCode::ConfigError,
                "parameter dimension exceeds the ambient dimension");
  if (static_cast<int>(components.size()) != ambient.dim())
    throw Error(ErrorCode::ConfigError,
                "embedding needs one component per ambient coordinate");
  Embedding e;
  e.ambient_ = std::move(ambient);
  e.params_ = std::move(params);
  e.components_ = std::move(components);
  const int n = e.ambient_.dim();
  const int m = e.params_.dim();
  e.jac_ = ExprMatrix(n, m);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a)
      e.jac_.at(i, a) = e.components_[static_cast<size_t>(i)].derivative(a);
  return e;
}

Point Embedding::ambient_point(const Point& u) const {
  Point x(static_cast<size_t>(ambient_.dim()));
  for (int i = 0; i < ambient_.dim(); ++i)
    x[static_cast<size_t>(i)] = components_[static_cast<size_t>(i)].evaluate(u);
  return x;
}

std::vector<AdmissionPredicate> Embedding::admission(
    const std::vector<const MetricField*>& ambient_metrics) const {
  std::vector<AdmissionPredicate> preds;
  const Embedding* self = this;
  preds.push_back([self](const Point& u) {
    try {
      const Point x = self->ambient_point(u);
      for (const auto& excl : self->ambient().exclusions)
        if (std::fabs(excl.evaluate(x)) < kExclusionFloor) return false;
      return full_rank(eval_matrix(self->jacobian(), u));
    } catch (const Error&) {
      return false;
    }
  });
  for (const MetricField* m : ambient_metrics) {
    const Expr det = determinant(m->mat).simplified();
    preds.push_back([self, det](const Point& u) {
      try {
        return std::fabs(det.evaluate(self->ambient_point(u))) > kDetFloor;
      } catch (const Error&) {
        return false;
      }
    });
  }
  return preds;
}

MetricField pullback_metric(const MetricField& g_amb_cov,
                            const Embedding& emb) {
  if (g_amb_cov.variance != Variance::Covariant)
    throw Error(ErrorCode::Internal, "pullback expects a covariant metric");
  const int n = emb.ambient().dim();
  const int m = emb.params().dim();

  ExprMatrix gsub(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gsub.at(i, j) = g_amb_cov.mat.at(i, j).substituted(emb.components());

  MetricField h;
  h.chart = emb.params();
  h.variance = Variance::Covariant;
  h.mat = ExprMatrix(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Expr sum;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          sum = sum + gsub.at(i, j) * emb.jacobian().at(i, a) *
                          emb.jacobian().at(j, b);
      h.mat.at(a, b) = sum.simplified();
    }
  return h;
}

Pencil induced_pencil(const Pencil& ambient, const Embedding& emb,
                      const std::vector<Point>& param_points,
                      std::vector<double> lambdas) {
  const MetricField h_cov = pullback_metric(ambient.g().cov, emb);
  const MetricField ht_cov = pullback_metric(ambient.gt().cov, emb);
  for (const MetricField* m : {&h_cov, &ht_cov}) {
    const Expr det = determinant(m->mat).simplified();
    for (const auto& u : param_points)
      if (std::fabs(det.evaluate(u)) <= kDetFloor)
        throw Error(ErrorCode::SingularInducedMetric,
                    "induced metric degenerates at a parameter sample", u);
  }
  const MetricField h = invert_metric(h_cov);
  const MetricField ht = invert_metric(ht_cov);
  return Pencil::build(emb.params(), h, ht, std::move(lambdas));
}

CheckReport check_distinguished(const Pencil& ambient, const Embedding& emb,
                                const RunContext& param_ctx) {
  const int m = emb.params().dim();
  ResidualTracker invariance, crosscheck;
  bool rank_ok = true;
  Point rank_witness;
  for (const auto& u : param_ctx.points) {
    const Point x = emb.ambient_point(u);
    const Eigen::MatrixXd j = eval_matrix(emb.jacobian(), u);
    if (!full_rank(j)) {
      rank_ok = false;
      rank_witness = u;
      break;
    }
    const Eigen::MatrixXd a = eval_matrix(ambient.endomorphism(), x);
    const Eigen::MatrixXd g_cov = eval_matrix(ambient.g().cov.mat, x);
    const Eigen::MatrixXd gt_cov = eval_matrix(ambient.gt().cov.mat, x);
    const Eigen::MatrixXd h = j.transpose() * g_cov * j;
    const Eigen::MatrixXd ht = j.transpose() * gt_cov * j;
    const Eigen::MatrixXd b = ht.partialPivLu().solve(h);  // induced pair map
    const Eigen::MatrixXd proj =
        ht.partialPivLu().solve(j.transpose() * gt_cov);  // tangential coeffs
    for (int col = 0; col < m; ++col) {
      const Eigen::VectorXd av = a * j.col(col);
      const auto [t, res] = span_fit(j, av);
      invariance.add(res, av.norm(), u, "A J_" + std::to_string(col + 1));
      const Eigen::VectorXd tangential = proj * av;
      for (int row = 0; row < m; ++row)
        crosscheck.add(tangential(row) - b(row, col),
                  std::max(std::fabs(tangential(row)), std::fabs(b(row, col))),
                  u,
                  "tangential A vs induced map (" + std::to_string(row + 1) +
                      "," + std::to_string(col + 1) + ")");
    }
  }

  CheckReport report;
  report.check = "distinguished";
  if (!rank_ok) {
    report.verdict = Verdict::Fail;
    report.residual = 1.0;
    report.witnesses.push_back(
        Witness{rank_witness, "jacobian loses rank here"});
    report.notes.push_back("embedding is rank-deficient at a sample");
    return report;
  }
  report.sub_verdicts.push_back(invariance.sub("tangent-invariance",
                                               param_ctx.tolerance));
  report.sub_verdicts.push_back(
      crosscheck.sub("tangential-part-matches-induced-map", param_ctx.tolerance));
  report.residual = std::max(invariance.max(), crosscheck.max());
  report.verdict = report.residual <= param_ctx.tolerance ? Verdict::Pass
                                                          : Verdict::Fail;
  report.witnesses.push_back(invariance.max() >= crosscheck.max()
                                 ? invariance.worst()
                                 : crosscheck.worst());
  return report;
}

namespace {

struct PointFrame {
  Eigen::MatrixXd j;        // n x m
  Eigen::MatrixXd gt_cov;   // ambient, at x(u)
  Eigen::MatrixXd gt_up;
  Eigen::MatrixXd ht;       // induced covariant gt
  Eigen::MatrixXd ht_inv;
  NumT3 contorsion;         // ambient K at x(u)
};

PointFrame make_frame(const Pencil& ambient, const Embedding& emb,
                      const Point& u) {
  PointFrame f{.j = eval_matrix(emb.jacobian(), u),
               .gt_cov = {},
               .gt_up = {},
               .ht = {},
               .ht_inv = {},
               .contorsion = NumT3(0)};
  const Point x = emb.ambient_point(u);
  f.gt_cov = eval_matrix(ambient.gt().cov.mat, x);
  f.gt_up = eval_matrix(ambient.gt().contra.mat, x);
  f.ht = f.j.transpose() * f.gt_cov * f.j;
  f.ht_inv = f.ht.inverse();
  f.contorsion = eval_t3(ambient.contorsion(), x);
  return f;
}

// zero-extension of du^c: the unique form in gt(T N) agreeing with du^c on
// the tangent columns
Eigen::VectorXd extend_conormal(const PointFrame& f, int c) {
  const int m = static_cast<int>(f.j.cols());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  e(c) = 1.0;
  return f.gt_cov * f.j * (f.ht_inv * e);
}

// projection of an ambient covector onto the annihilator of T N along
// gt(T N)
Eigen::VectorXd project_annihilator(const PointFrame& f,
                                    const Eigen::VectorXd& theta) {
  return theta - f.gt_cov * f.j * (f.ht_inv * (f.j.transpose() * theta));
}

Eigen::VectorXd sff_difference(const PointFrame& f, int tangent_index,
                               int conormal_index) {
  const int n = static_cast<int>(f.j.rows());
  const Eigen::VectorXd alpha_bar = extend_conormal(f, conormal_index);
  Eigen::VectorXd nabla_diff(n);
  for (int jj = 0; jj < n; ++jj) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        sum -= f.j(i, tangent_index) * f.contorsion.at(k, i, jj) * alpha_bar(k);
    nabla_diff(jj) = sum;
  }
  return project_annihilator(f, nabla_diff);
}

}  // namespace

Eigen::VectorXd second_ff_difference(const Pencil& ambient,
                                     const Embedding& emb, const Point& u,
                                     int tangent_index, int conormal_index,
                                     double tol) {
  const PointFrame f = make_frame(ambient, emb, u);
  const Point x = emb.ambient_point(u);
  const Eigen::MatrixXd a = eval_matrix(ambient.endomorphism(), x);
  for (int col = 0; col < f.j.cols(); ++col) {
    const Eigen::VectorXd av = a * f.j.col(col);
    const auto [t, res] = span_fit(f.j, av);
    if (res > tol * (1.0 + av.norm()))
      throw Error(ErrorCode::NotDistinguished,
                  "submanifold is not distinguished at this point", u);
  }
  return sff_difference(f, tangent_index, conormal_index);
}

CheckReport check_induced_compatibility(const Pencil& ambient,
                                        const Embedding& emb,
                                        const RunContext& param_ctx,
                                        const CheckReport& distinguished,
                                        const CheckReport& ambient_compatible) {
  if (!distinguished.passed())
    throw Error(ErrorCode::NotDistinguished,
                "induced_compatibility requires a distinguished submanifold");
  if (!ambient_compatible.passed())
    throw Error(ErrorCode::PreconditionFailed,
                "induced_compatibility requires a compatible ambient pair");
  const int m = emb.params().dim();

  // (a) sandwich symmetry of the second-fundamental-form differences
  ResidualTracker sandwich;
  for (const auto& u : param_ctx.points) {
    const PointFrame f = make_frame(ambient, emb, u);
    std::vector<std::vector<Eigen::VectorXd>> sff(
        static_cast<size_t>(m), std::vector<Eigen::VectorXd>(
                                    static_cast<size_t>(m)));
    for (int a = 0; a < m; ++a)
      for (int c = 0; c < m; ++c)
        sff[static_cast<size_t>(a)][static_cast<size_t>(c)] =
            sff_difference(f, a, c);
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) {
            const Eigen::VectorXd& sxa = sff[static_cast<size_t>(a)][static_cast<size_t>(c)];
            const Eigen::VectorXd& syb = sff[static_cast<size_t>(b)][static_cast<size_t>(d)];
            const Eigen::VectorXd& sya = sff[static_cast<size_t>(b)][static_cast<size_t>(c)];
            const Eigen::VectorXd& sxb = sff[static_cast<size_t>(a)][static_cast<size_t>(d)];
            const double lhs = sxa.dot(f.gt_up * syb);
            const double rhs = sya.dot(f.gt_up * sxb);
            sandwich.add(lhs - rhs,
                         std::max(std::fabs(lhs), std::fabs(rhs)), u,
                         "X=J" + std::to_string(a + 1) + " Y=J" +
                             std::to_string(b + 1) + " alpha=du" +
                             std::to_string(c + 1) + " beta=du" +
                             std::to_string(d + 1));
          }
  }

  // (b) direct compatibility of the induced pair
  Pencil induced = induced_pencil(ambient, emb, param_ctx.points,
                                  ambient.lambdas());
  RunContext induced_ctx = param_ctx;
  const CheckReport almost = check_almost_compatible(induced, induced_ctx);
  CheckReport direct;
  if (almost.passed()) {
    direct = check_compatible(induced, induced_ctx, almost);
  } else {
    direct.check = "compatible";
    direct.verdict = Verdict::Fail;
    direct.residual = almost.residual;
    direct.witnesses = almost.witnesses;
  }

  // projected-product identity
  const CircProduct amb_circ = make_circ(ambient);
  ResidualTracker circn;
  for (const auto& u : param_ctx.points) {
    const PointFrame f = make_frame(ambient, emb, u);
    const Point x = emb.ambient_point(u);
    const NumT3 o_amb = eval_t3(amb_circ.structure, x);
    const NumT3 o_ind = eval_t3(make_circ(induced).structure, u);
    for (int a = 0; a < m; ++a)
      for (int c = 0; c < m; ++c) {
        const Eigen::VectorXd abar = extend_conormal(f, a);
        const Eigen::VectorXd bbar = extend_conormal(f, c);
        for (int b = 0; b < m; ++b) {
          double rhs = 0.0;
          const int n = emb.ambient().dim();
          for (int xx = 0; xx < n; ++xx)
            for (int yy = 0; yy < n; ++yy)
              for (int jj = 0; jj < n; ++jj)
                rhs += abar(xx) * bbar(yy) * o_amb.at(xx, yy, jj) * f.j(jj, b);
          const double lhs = o_ind.at(a, c, b);
          circn.add(lhs - rhs, std::max(std::fabs(lhs), std::fabs(rhs)), u,
                    "alpha=du" + std::to_string(a + 1) + " beta=du" +
                        std::to_string(c + 1) + " comp=" + std::to_string(b + 1));
        }
      }
  }

  std::vector<SubVerdict> subs{
      sandwich.sub("sandwich-symmetry", param_ctx.tolerance),
      SubVerdict{"direct-induced-compatibility", direct.verdict,
                 direct.residual},
      circn.sub("projected-product", param_ctx.tolerance)};
  std::vector<Witness> wit;
  if (sandwich.max() > param_ctx.tolerance) wit.push_back(sandwich.worst());
  if (!direct.passed() && !direct.witnesses.empty())
    wit.push_back(direct.witnesses.front());
  if (circn.max() > param_ctx.tolerance) wit.push_back(circn.worst());
  if (wit.empty() && sandwich.has_samples()) wit.push_back(sandwich.worst());
  CheckReport report = combine_subs("induced_compatibility", std::move(subs),
                                    std::move(wit));
  const bool pa = sandwich.max() <= param_ctx.tolerance;
  const bool pb = direct.passed();
  if (pa != pb) {
    report.inconsistent = true;
    report.notes.push_back(
        "sandwich criterion and direct induced compatibility disagree; this "
        "indicates a library defect");
  }
  // the projected-product identity holds for any pair and is reported only
  return report;
}

CheckReport check_fman_submanifold(const FMan& fman, const Embedding& emb,
                                   const RunContext& ambient_ctx,
                                   const RunContext& param_ctx,
                                   const CheckReport& weak_f) {
  if (!weak_f.passed())
    throw Error(ErrorCode::PreconditionFailed,
                "fman_submanifold requires the weak symmetry condition");
  const int n = emb.ambient().dim();
  const int m = emb.params().dim();

  ResidualTracker closure_c, closure_e, projector;
  Witness closure_witness;
  for (const auto& u : param_ctx.points) {
    const Point x = emb.ambient_point(u);
    const Eigen::MatrixXd j = eval_matrix(emb.jacobian(), u);
    const NumT3 cv = eval_t3(fman.c(), x);
    const Eigen::MatrixXd mm = eval_matrix(fman.euler_mult(), x);
    const Eigen::MatrixXd gt = eval_matrix(fman.gt().cov.mat, x);
    const Eigen::MatrixXd ht = j.transpose() * gt * j;
    const Eigen::MatrixXd coeff = ht.inverse() * j.transpose() * gt;

    auto product = [&](const Eigen::VectorXd& v,
                       const Eigen::VectorXd& w) {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int jj = 0; jj < n; ++jj) out(k) += cv.at(k, i, jj) * v(i) * w(jj);
      return out;
    };

    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        const Eigen::VectorXd v = product(j.col(a), j.col(b));
        const auto [t, res] = span_fit(j, v);
        closure_c.add(res, v.norm(), u,
                      "J" + std::to_string(a + 1) + " . J" +
                          std::to_string(b + 1));
      }
      const Eigen::VectorXd ev = mm * j.col(a);
      const auto [t, res] = span_fit(j, ev);
      closure_e.add(res, ev.norm(), u, "E . J" + std::to_string(a + 1));
    }

    // X . P(Y) = P(X . Y) with P the orthogonal projection onto the normal
    // bundle
    auto normal_project = [&](const Eigen::VectorXd& y) {
      return (y - j * (coeff * y)).eval();
    };
    for (int a = 0; a < m; ++a)
      for (int pdir = 0; pdir < n; ++pdir) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
        y(pdir) = 1.0;
        const Eigen::VectorXd lhs = product(j.col(a), normal_project(y));
        const Eigen::VectorXd rhs = normal_project(product(j.col(a), y));
        for (int k = 0; k < n; ++k)
          projector.add(lhs(k) - rhs(k),
                        std::max(lhs.cwiseAbs().maxCoeff(),
                                 rhs.cwiseAbs().maxCoeff()),
                        u,
                        "X=J" + std::to_string(a + 1) + " Y=d" +
                            std::to_string(pdir + 1) + " comp=" +
                            std::to_string(k + 1));
      }
  }

  std::vector<SubVerdict> subs{
      closure_c.sub("product-closure", param_ctx.tolerance),
      closure_e.sub("euler-closure", param_ctx.tolerance),
      projector.sub("projector-exchange", param_ctx.tolerance)};
  std::vector<Witness> wit;
  std::vector<std::string> notes;
  if (closure_c.max() > param_ctx.tolerance) {
    wit.push_back(closure_c.worst());
    notes.push_back("hypothesis 1 (product closure) fails");
  }
  if (closure_e.max() > param_ctx.tolerance) {
    wit.push_back(closure_e.worst());
    notes.push_back("hypothesis 2 (Euler closure) fails");
  }
  if (projector.max() > param_ctx.tolerance) {
    wit.push_back(projector.worst());
    notes.push_back("projector exchange identity fails");
  }

  const bool hypotheses_ok = notes.empty();
  CheckReport induced;
  if (hypotheses_ok) {
    Pencil built = build_pencil_from_fman(fman, ambient_ctx);
    CheckReport dist = check_distinguished(built, emb, param_ctx);
    RunContext amb_ctx2 = ambient_ctx;
    const CheckReport almost = check_almost_compatible(built, amb_ctx2);
    CheckReport amb_comp;
    if (almost.passed()) {
      amb_comp = check_compatible(built, amb_ctx2, almost);
    } else {
      amb_comp.check = "compatible";
      amb_comp.verdict = Verdict::Fail;
    }
    induced =
        check_induced_compatibility(built, emb, param_ctx, dist, amb_comp);
    subs.push_back(SubVerdict{"induced-compatibility", induced.verdict,
                              induced.residual});
    subs.push_back(SubVerdict{"distinguished", dist.verdict, dist.residual});
  } else {
    subs.push_back(SubVerdict{"induced-compatibility", Verdict::Skipped, 0.0});
  }

  if (wit.empty()) {
    if (closure_c.has_samples()) wit.push_back(closure_c.worst());
  }
  CheckReport report =
      combine_subs("fman_submanifold", std::move(subs), std::move(wit));
  for (auto& note : notes) report.notes.push_back(std::move(note));
  if (!hypotheses_ok)
    report.notes.push_back(
        "closure hypotheses fail; induced compatibility skipped");
  return report;
}

}  // namespace pencilkit
