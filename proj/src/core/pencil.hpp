#pragma once

#include <map>
#include <memory>
#include <optional>

#include "core/geometry.hpp"

namespace pencilkit {

inline const std::vector<double> kDefaultLambdas = {-2.0, -0.5, 1.0 / 3.0, 1.0,
                                                    3.0};

// Sampling configuration shared by every check.
struct RunContext {
  double tolerance = 1e-8;
  std::uint64_t seed = 42;
  std::vector<Point> points;
};

// Everything derived from one metric: both variances, determinants,
// Levi-Civita connection and curvature.
struct MetricGeometry {
  MetricField contra;  // g^ij
  MetricField cov;     // g_ij
  Expr det_contra;
  Expr det_cov;
  ConnectionField conn;
  CurvatureField curv;
};

MetricGeometry make_metric_geometry(const MetricField& contra);
MetricGeometry make_metric_geometry_from_cov(const MetricField& cov);

// A pair of contravariant metrics on a common chart together with the
// lambda samples used for pencil-family checks.  All derived symbolic data
// is computed once at construction.
class Pencil {
 public:
  static Pencil build(Chart chart, MetricField g_contra, MetricField gt_contra,
                      std::vector<double> lambdas = kDefaultLambdas);

  const Chart& chart() const { return chart_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const MetricGeometry& g() const { return g_; }
  const MetricGeometry& gt() const { return gt_; }

  // K^k_ij = Gamma^k_ij - tilde Gamma^k_ij
  const ExprT3& contorsion() const { return contorsion_; }
  // A^i_j = gt^{ik} g_kj
  const ExprMatrix& endomorphism() const { return a_; }

  // Geometry of g + lambda * gt; cached per lambda.
  const MetricGeometry& lambda_geometry(double lambda) const;

  // Admission predicates for this pencil's metrics.
  std::vector<AdmissionPredicate> admission() const;

  // |det(g_lambda)| evaluated at p.
  double lambda_det(double lambda, const Point& p) const;

 private:
  Chart chart_;
  std::vector<double> lambdas_;
  MetricGeometry g_;
  MetricGeometry gt_;
  ExprT3 contorsion_;
  ExprMatrix a_;
  mutable std::map<double, std::shared_ptr<const MetricGeometry>> lambda_cache_;
};

// N^k_ij of an endomorphism field A, from
//   N_A(X, Y) = -[AX, AY] + A[AX, Y] + A[X, AY] - A^2 [X, Y].
ExprT3 nijenhuis(const ExprMatrix& a);

struct LambdaPlan {
  std::vector<double> usable;
  std::vector<std::string> warnings;  // one per skipped lambda
};

// Drops lambda values whose pencil metric degenerates at an admitted point;
// throws SingularPencil when fewer than 3 survive.
LambdaPlan plan_lambdas(const Pencil& pencil, const std::vector<Point>& points);

// Two independent verdicts that must agree: the lambda-sampled
// connection-pencil identity and vanishing of the Nijenhuis tensor of A.
CheckReport check_almost_compatible(const Pencil& pencil, const RunContext& ctx);

// Curvature-pencil identity plus the two contorsion quadratic symmetries
// (with g and with gt).  Throws PreconditionFailed unless the pair is
// almost compatible.
CheckReport check_compatible(const Pencil& pencil, const RunContext& ctx,
                             const CheckReport& almost);

// Cross-metric contorsion exchange identity for almost compatible pairs.
CheckReport check_prop_au(const Pencil& pencil, const RunContext& ctx,
                          const CheckReport& almost);

// Max curvature over the lambda family; reports |R| and |Rt| separately.
CheckReport check_flat_pencil(const Pencil& pencil, const RunContext& ctx);

// Pointwise eigenvalues of A must stay pairwise separated by more than the
// gap floor at every sample.
CheckReport check_semisimple(const Pencil& pencil, const RunContext& ctx);

constexpr double kEigenGapFloor = 1e-6;

}  // namespace pencilkit
