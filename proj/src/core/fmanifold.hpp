#pragma once

#include <optional>

#include "core/circ.hpp"
#include "core/pencil.hpp"

namespace pencilkit {

// A multiplication on the tangent bundle (structure functions c^k_ij,
// symmetric in the lower pair), an invariant metric stored covariantly, an
// Euler field and its two scaling constants: L_E(c) = k c and
// L_E(gt) = D gt on the covariant metric.
class FMan {
 public:
  static FMan build(Chart chart, ExprT3 c, MetricField gt_cov,
                    VectorFieldExpr euler, double k_scale, double d_scale,
                    std::optional<VectorFieldExpr> unity = std::nullopt);

  const Chart& chart() const { return chart_; }
  const ExprT3& c() const { return c_; }
  const MetricGeometry& gt() const { return gt_; }
  const VectorFieldExpr& euler() const { return euler_; }
  const std::optional<VectorFieldExpr>& unity_field() const { return unity_; }
  double k_scale() const { return k_; }
  double d_scale() const { return d_; }

  // E-multiplication matrix M^i_j = c^i_{sj} E^s.
  const ExprMatrix& euler_mult() const { return euler_mult_; }
  // nabla~_j E^i.
  const ExprMatrix& grad_euler() const { return grad_euler_; }
  // nabla~_i c^k_{jl}, stored at (i, k, j, l).
  const ExprT4& nabla_c() const { return nabla_c_; }
  // Cotangent transport of c: (dx^a . dx^b)_j, stored at (a, b, j).
  const ExprT3& cotangent_mult() const { return cot_mult_; }
  // nabla~_i of the cotangent product, stored at (i, a, b, j).
  const ExprT4& nabla_cotangent_mult() const { return nabla_cot_mult_; }
  // gt(E).
  const OneFormExpr& euler_flat() const { return euler_flat_; }

  // Pointwise unity values: the supplied field, or the least-squares
  // solution of e^i c^k_ij = delta^k_j.  Throws NoUnity when the solve does
  // not close.
  Eigen::VectorXd unity_at(const Point& p) const;
  // (E.)^{-1} applied to the unity; throws NotInvertibleEulerMultiplication.
  Eigen::VectorXd euler_inverse_at(const Point& p) const;
  // gt(E^{-1}) = the product-inverse of gt(E) on the cotangent side.
  Eigen::VectorXd euler_flat_inverse_at(const Point& p) const;

 private:
  Chart chart_;
  ExprT3 c_;
  MetricGeometry gt_;
  VectorFieldExpr euler_;
  std::optional<VectorFieldExpr> unity_;
  double k_ = 1.0;
  double d_ = 0.0;
  ExprMatrix euler_mult_;
  ExprMatrix grad_euler_;
  ExprT4 nabla_c_;
  ExprT3 cot_mult_;
  ExprT4 nabla_cot_mult_;
  OneFormExpr euler_flat_;
};

// T acting on 1-forms, (T u)_j = T^a_j u_a with
//   T^a_j = ((d - 1)/2) delta^a_j + nabla~_j E^a,   d = 1 + k - D.
// Both printed forms of the operator coincide whenever L_E(gt) = D gt; the
// difference is reported as a diagnostic.
struct TOperator {
  double degree = 0.0;
  ExprMatrix mat;        // primary form
  ExprMatrix alt_mat;    // ((D+k)/2) u - gt(nabla~_{gt* u} E)
  Expr det;
  double min_abs_det = 0.0;   // over the points it was verified on
  double forms_difference = 0.0;

  bool regular() const { return min_abs_det > kDetFloor; }
};

TOperator make_t_operator(const FMan& fman, const std::vector<Point>& points);
// Same operator built from pencil-side data (gt geometry, Euler field and
// an explicit degree).
TOperator make_t_operator(const MetricGeometry& gt, const VectorFieldExpr& e,
                          double degree, const std::vector<Point>& points);

// A pencil with Euler data and bi-degree; the optional potential enables
// the full quasi-homogeneity suite.
struct QHPencil {
  Pencil pencil;
  VectorFieldExpr euler;
  double degree_d = 0.0;
  double degree_dd = 0.0;
  std::optional<Expr> potential;
  std::optional<VectorFieldExpr> unity;
};

CheckReport check_algebra(const FMan& fman, const RunContext& ctx);
CheckReport check_invariant_metric(const FMan& fman, const RunContext& ctx);
CheckReport check_t_operator(const FMan& fman, const RunContext& ctx);

// nabla~(c) paired with gt, contracted with the Euler slot two ways.
CheckReport check_weak_f_condition(const FMan& fman, const RunContext& ctx,
                                   const CheckReport& algebra,
                                   const CheckReport& invariance);

// Full symmetry of the paired nabla~(c) tensor in all four slots.
CheckReport check_f_condition(const FMan& fman, const RunContext& ctx,
                              const CheckReport& algebra,
                              const CheckReport& invariance);

// Euler scaling residuals L_E(c) = k c and L_E(gt) = D gt; used as a
// precondition by the curvature checks.
CheckReport check_euler_scaling(const FMan& fman, const RunContext& ctx);

// g* = (E.) gt*; verifies symmetry and L_E(g*) = (k - D) g*.
Pencil build_pencil_from_fman(const FMan& fman, const RunContext& ctx,
                              std::vector<double> lambdas = kDefaultLambdas,
                              CheckReport* report = nullptr);

// Nijenhuis tensor of the E-multiplication endomorphism.
CheckReport check_nijenhuis_euler(const FMan& fman, const RunContext& ctx,
                                  const CheckReport& weak_f);

// Connection-difference identity against the product with (E flat)^{-1}.
CheckReport check_ec_identity(const FMan& fman, const Pencil& built,
                              const RunContext& ctx);

// Curvature relation for the built pencil: full form (with the derivative
// of the product) and the reduced form whose verdict tracks full symmetry.
CheckReport check_curvature_relation(const FMan& fman, const Pencil& built,
                                     const RunContext& ctx,
                                     const CheckReport& weak_f,
                                     const CheckReport& euler_scaling);

CheckReport check_weak_qh(const QHPencil& qh, const RunContext& ctx,
                          const CheckReport& compatible);
CheckReport check_qh(const QHPencil& qh, const RunContext& ctx,
                     const CheckReport& compatible);

// u . v := u o T^{-1}(v) pushed to the tangent bundle through gt, with
// unity gt* g(E).  Throws NotAutomorphism when T is singular on the chart.
FMan build_fman_from_pencil(const QHPencil& qh, const RunContext& ctx);

// build_pencil -> build_fman round trip; compares structure functions and
// unity values at the sample points.
CheckReport check_roundtrip(const FMan& fman, const RunContext& ctx,
                            const CheckReport& weak_qh);

}  // namespace pencilkit
