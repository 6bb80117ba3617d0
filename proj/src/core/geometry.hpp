#pragma once

#include "core/chart.hpp"
#include "core/linalg.hpp"
#include "core/report.hpp"

namespace pencilkit {

enum class Variance { Covariant, Contravariant };

// Symmetric matrix of expressions on a chart.  Stores either g_ij or g^ij;
// the variance flag says which.
struct MetricField {
  Chart chart;
  ExprMatrix mat;
  Variance variance = Variance::Covariant;

  int dim() const { return chart.dim(); }

  // Componentwise symmetry at construction time is structural; this checks
  // it numerically at the given points as a safety net.
  void verify_symmetric(const std::vector<Point>& points, double tol) const;
};

struct VectorFieldExpr {
  Chart chart;
  std::vector<Expr> comps;  // X^i
};

struct OneFormExpr {
  Chart chart;
  std::vector<Expr> comps;  // alpha_i
};

// Gamma^k_ij, symmetric in (i, j).
struct ConnectionField {
  Chart chart;
  ExprT3 gamma;
};

// R^l_kij for the convention R(d_i, d_j) d_k = R^l_kij d_l, i.e.
//   R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik
//           + Gamma^l_is Gamma^s_jk - Gamma^l_js Gamma^s_ik.
// On 1-forms: (R_{X,Y} alpha)_k = -R^l_kij X^i Y^j alpha_l.
struct CurvatureField {
  Chart chart;
  ExprT4 riem;
};

// ---------------------------------------------------------------------------

// Symbolic inverse with the opposite variance.
MetricField invert_metric(const MetricField& m, Expr* det_out = nullptr);

// Determinant magnitude floor used everywhere a metric must be invertible
// at a sample point.
constexpr double kDetFloor = 1e-9;

// Predicate for rejection sampling: |det| > kDetFloor.
AdmissionPredicate det_floor_predicate(const MetricField& m);

// Throws SingularMetric with a witness if |det| <= kDetFloor at any point.
void verify_invertible(const MetricField& m, const std::vector<Point>& points);

// Levi-Civita connection of a covariant metric via
// Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
ConnectionField christoffel(const MetricField& g_cov);

CurvatureField riemann(const ConnectionField& conn);

// (nabla alpha)_ij = d_i alpha_j - Gamma^k_ij alpha_k.
ExprMatrix covariant_derivative_oneform(const ConnectionField& conn,
                                        const OneFormExpr& alpha);

// (nabla X)^i_j = d_j X^i + Gamma^i_jk X^k; column j is nabla_j X.
ExprMatrix covariant_derivative_vector(const ConnectionField& conn,
                                       const VectorFieldExpr& x);

OneFormExpr lower(const MetricField& g_cov, const VectorFieldExpr& x);
VectorFieldExpr raise(const MetricField& g_contra, const OneFormExpr& alpha);

// Lie derivative of a metric along E.  Contravariant:
//   (L_E m)^{ij} = E^k d_k m^{ij} - m^{kj} d_k E^i - m^{ik} d_k E^j
// Covariant:
//   (L_E m)_{ij} = E^k d_k m_{ij} + m_{kj} d_i E^k + m_{ik} d_j E^k
ExprMatrix lie_derivative_metric(const VectorFieldExpr& e, const MetricField& m);

VectorFieldExpr gradient(const MetricField& g_contra, const Expr& f);

// Conformal-Killing cross identity: for L_E(g) = D g with constant D,
//   g((nabla_X (nabla E))(Y), Z) = g(R(Y, Z) X, E).
// The report carries the precondition residual and, when it holds, the
// identity residual over seeded random frames.
CheckReport check_killing_identity(const MetricField& g_cov,
                                   const VectorFieldExpr& e, double d_const,
                                   const std::vector<Point>& points,
                                   double tol, std::uint64_t seed);

}  // namespace pencilkit
