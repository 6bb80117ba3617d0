#include "core/hamiltonian.hpp"

#include <cmath>
#include <sstream>

namespace pencilkit {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

DNOperatorData assemble_dn_operator(const MetricGeometry& geo,
                                    const RunContext& ctx) {
  const int n = geo.contra.mat.rows;
  DNOperatorData data;
  data.g_contra = geo.contra.mat;
  data.b = ExprT3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Expr sum;
        for (int s = 0; s < n; ++s)
          sum = sum - geo.contra.mat.at(i, s) * geo.conn.gamma.at(j, s, k);
        data.b.at(k, i, j) = sum.simplified();
      }

  ResidualTracker sym, compat, torsion, curv;
  for (const auto& p : ctx.points) {
    const Eigen::MatrixXd gv = eval_matrix(geo.contra.mat, p);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        sym.add(gv(i, j) - gv(j, i),
                std::max(std::fabs(gv(i, j)), std::fabs(gv(j, i))), p,
                "g^" + std::to_string(i + 1) + std::to_string(j + 1));

    const NumT3 bv = eval_t3(data.b, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          // metric compatibility: d_k g^ij = b^{ij}_k + b^{ji}_k
          const double dg =
              geo.contra.mat.at(i, j).derivative(k).evaluate(p);
          const double rhs = bv.at(k, i, j) + bv.at(k, j, i);
          compat.add(dg - rhs, std::max(std::fabs(dg), std::fabs(rhs)), p,
                     "d_" + std::to_string(k + 1) + " g^" +
                         std::to_string(i + 1) + std::to_string(j + 1));
          // torsion-free pattern: g^{is} b^{jk}_s = g^{js} b^{ik}_s
          double lhs2 = 0.0, rhs2 = 0.0;
          for (int s = 0; s < n; ++s) {
            lhs2 += gv(i, s) * bv.at(s, j, k);
            rhs2 += gv(j, s) * bv.at(s, i, k);
          }
          torsion.add(lhs2 - rhs2,
                      std::max(std::fabs(lhs2), std::fabs(rhs2)), p,
                      "(" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + "," + std::to_string(k + 1) +
                          ")");
        }

    const NumT4 rv = eval_t4(geo.curv.riem, p);
    const NumT3 gammav = eval_t3(geo.conn.gamma, p);
    double gm = 0.0;
    for (double v : gammav.m) gm = std::max(gm, std::fabs(v));
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            curv.add(rv.at(l, k, i, j), gm * gm + gm, p,
                     "R^" + std::to_string(l + 1) + "_" +
                         std::to_string(k + 1) + std::to_string(i + 1) +
                         std::to_string(j + 1));
  }

  data.flat = curv.max() <= ctx.tolerance;
  data.curvature_norm = curv.max();

  std::vector<SubVerdict> subs{
      sym.sub("symmetry", ctx.tolerance),
      compat.sub("levi-civita-compatibility", ctx.tolerance),
      torsion.sub("levi-civita-torsion-pattern", ctx.tolerance),
      SubVerdict{"flatness", data.flat ? Verdict::Pass : Verdict::Fail,
                 curv.max()}};
  std::vector<Witness> wit;
  for (const ResidualTracker* t : {&sym, &compat, &torsion})
    if (t->max() > ctx.tolerance) wit.push_back(t->worst());
  if (!data.flat) wit.push_back(curv.worst());
  if (wit.empty() && sym.has_samples()) wit.push_back(sym.worst());

  // flatness decides locality of the operator, not admissibility
  CheckReport report;
  report.check = "dn_operator";
  report.sub_verdicts = std::move(subs);
  for (const auto& s : report.sub_verdicts)
    report.residual = std::max(report.residual, s.residual);
  const bool admissible = sym.max() <= ctx.tolerance &&
                          compat.max() <= ctx.tolerance &&
                          torsion.max() <= ctx.tolerance;
  report.verdict = admissible ? Verdict::Pass : Verdict::Fail;
  report.witnesses = std::move(wit);
  report.notes.push_back(
      data.flat ? "flat metric: local first-order Hamiltonian operator"
                : "curved metric: a nonlocal tail is required (curvature "
                  "norm " +
                      fmt(data.curvature_norm) + "); only the obstruction is "
                      "reported");
  report.notes.push_back(
      "finite admissibility conditions only; the loop-space bracket identity "
      "is not re-verified");
  data.report = std::move(report);
  return data;
}

DNOperatorData assemble_dn_operator(const MetricField& g,
                                    const RunContext& ctx) {
  const MetricGeometry geo = g.variance == Variance::Contravariant
                                 ? make_metric_geometry(g)
                                 : make_metric_geometry_from_cov(g);
  return assemble_dn_operator(geo, ctx);
}

PencilOperatorData assemble_pencil_operators(const Pencil& pencil,
                                             const RunContext& ctx,
                                             const CheckReport& flat,
                                             const CheckReport* compatible) {
  PencilOperatorData data{assemble_dn_operator(pencil.g(), ctx),
                          assemble_dn_operator(pencil.gt(), ctx),
                          CheckReport{}};
  CheckReport& report = data.report;
  report.check = "dn_pencil";
  report.sub_verdicts.push_back(SubVerdict{
      "operator-g", data.first.report.verdict, data.first.report.residual});
  report.sub_verdicts.push_back(SubVerdict{
      "operator-gt", data.second.report.verdict, data.second.report.residual});
  report.sub_verdicts.push_back(
      SubVerdict{"flat-pencil", flat.verdict, flat.residual});
  report.residual = std::max({data.first.report.residual,
                              data.second.report.residual, flat.residual});
  const bool admissible = data.first.report.passed() &&
                          data.second.report.passed();
  report.verdict = admissible ? Verdict::Pass : Verdict::Fail;
  if (flat.passed()) {
    report.notes.push_back("flat pencil: local bi-Hamiltonian pair");
  } else if (compatible != nullptr) {
    report.notes.push_back(
        std::string("curved pencil: nonlocal bi-Hamiltonian pair "
                    "(compatibility ") +
        (compatible->passed() ? "verified)" : "failed)"));
    if (!compatible->passed()) report.verdict = Verdict::Fail;
  } else {
    report.notes.push_back(
        "curved pencil: nonlocal bi-Hamiltonian pair (compatibility not "
        "evaluated)");
  }
  if (!flat.witnesses.empty() && !flat.passed())
    report.witnesses.push_back(flat.witnesses.front());
  else if (!data.first.report.witnesses.empty())
    report.witnesses.push_back(data.first.report.witnesses.front());
  return data;
}

}  // namespace pencilkit
