#pragma once

#include "core/fmanifold.hpp"

namespace pencilkit {

// An embedded submanifold given by coordinate expressions x^i(u) on a
// parameter chart.  The Jacobian columns span the tangent space of the
// image; they must stay full-rank at every admitted parameter sample.
class Embedding {
 public:
  static Embedding build(Chart ambient, Chart params,
                         std::vector<Expr> components);

  const Chart& ambient() const { return ambient_; }
  const Chart& params() const { return params_; }
  const std::vector<Expr>& components() const { return components_; }
  const ExprMatrix& jacobian() const { return jac_; }  // (i, a)

  Point ambient_point(const Point& u) const;

  // Admission for parameter sampling: ambient exclusions and determinant
  // floors are tested at the image point, the Jacobian at the parameter
  // point.
  std::vector<AdmissionPredicate> admission(
      const std::vector<const MetricField*>& ambient_metrics) const;

 private:
  Chart ambient_;
  Chart params_;
  std::vector<Expr> components_;
  ExprMatrix jac_;
};

// h_ab = g_ij(x(u)) J^i_a J^j_b.
MetricField pullback_metric(const MetricField& g_amb_cov, const Embedding& emb);

// Both induced metrics, stored contravariantly as a pencil on the
// parameter chart.  Throws SingularInducedMetric when an induced metric
// degenerates at one of the given points.
Pencil induced_pencil(const Pencil& ambient, const Embedding& emb,
                      const std::vector<Point>& param_points,
                      std::vector<double> lambdas = kDefaultLambdas);

// A(T N) inside T N, tested column by column with least squares, plus the
// cross-check that the tangential part of A matches the induced-pair
// endomorphism.
CheckReport check_distinguished(const Pencil& ambient, const Embedding& emb,
                                const RunContext& param_ctx);

// (S - S~)(alpha bar) for the tangent direction J_a and the zero-extension
// of du^c, as a covector on the ambient chart (annihilating T N).  Throws
// NotDistinguished when the invariance test fails at u.
Eigen::VectorXd second_ff_difference(const Pencil& ambient,
                                     const Embedding& emb, const Point& u,
                                     int tangent_index, int conormal_index,
                                     double tol);

// Two verdicts that must agree: the second-fundamental-form sandwich
// symmetry and direct compatibility of the induced pair; also evaluates the
// projected-product identity.  The ambient pair must already be compatible.
CheckReport check_induced_compatibility(const Pencil& ambient,
                                        const Embedding& emb,
                                        const RunContext& param_ctx,
                                        const CheckReport& distinguished,
                                        const CheckReport& ambient_compatible);

// Product and Euler closure of the tangent spaces, the projector exchange
// identity, then induced compatibility of the derived pencil.
CheckReport check_fman_submanifold(const FMan& fman, const Embedding& emb,
                                   const RunContext& ambient_ctx,
                                   const RunContext& param_ctx,
                                   const CheckReport& weak_f);

}  // namespace pencilkit
