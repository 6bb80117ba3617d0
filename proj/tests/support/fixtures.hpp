// Shared chart / metric / structure fixtures for the test suites.
#pragma once

#include <string>
#include <vector>

#include "core/fmanifold.hpp"
#include "core/pencil.hpp"

namespace pencilkit::testing {

inline Chart make_chart(std::vector<std::string> coords,
                        std::vector<std::array<double, 2>> box,
                        std::vector<std::string> exclusions = {}) {
  Chart c;
  c.coords = std::move(coords);
  c.box = std::move(box);
  for (const auto& text : exclusions)
    c.exclusions.push_back(parse_expression(text, c.coords));
  return c;
}

inline MetricField make_metric(const Chart& chart,
                               const std::vector<std::vector<std::string>>& rows,
                               Variance variance) {
  const int n = chart.dim();
  MetricField m;
  m.chart = chart;
  m.variance = variance;
  m.mat = ExprMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m.mat.at(i, j) = parse_expression(rows[static_cast<size_t>(i)]
                                            [static_cast<size_t>(j)],
                                        chart.coords);
  return m;
}

inline VectorFieldExpr make_vector(const Chart& chart,
                                   const std::vector<std::string>& comps) {
  VectorFieldExpr v;
  v.chart = chart;
  for (const auto& text : comps)
    v.comps.push_back(parse_expression(text, chart.coords));
  return v;
}

inline OneFormExpr make_oneform(const Chart& chart,
                                const std::vector<std::string>& comps) {
  OneFormExpr a;
  a.chart = chart;
  for (const auto& text : comps)
    a.comps.push_back(parse_expression(text, chart.coords));
  return a;
}

inline RunContext make_ctx(const Chart& chart, const Pencil* pencil = nullptr,
                           int count = 60, std::uint64_t seed = 42,
                           double tol = 1e-8) {
  RunContext ctx;
  ctx.tolerance = tol;
  ctx.seed = seed;
  std::vector<AdmissionPredicate> admit;
  if (pencil) admit = pencil->admission();
  ctx.points = sample_points(chart, count, seed, admit);
  return ctx;
}

// -- canonical pairs ---------------------------------------------------------

inline Pencil constant_pair() {
  const Chart c = make_chart({"x1", "x2"}, {{0.0, 1.0}, {0.0, 1.0}});
  return Pencil::build(
      c, make_metric(c, {{"2", "1"}, {"1", "3"}}, Variance::Contravariant),
      make_metric(c, {{"1", "0"}, {"0", "2"}}, Variance::Contravariant));
}

inline Pencil semisimple_pair() {
  const Chart c =
      make_chart({"x1", "x2"}, {{1.0, 2.0}, {1.0, 2.0}}, {"x1 - x2"});
  return Pencil::build(
      c, make_metric(c, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant),
      make_metric(c, {{"x1", "0"}, {"0", "x2"}}, Variance::Contravariant));
}

inline Pencil crossed_pair() {
  const Chart c =
      make_chart({"x1", "x2"}, {{1.0, 2.0}, {1.0, 2.0}}, {"x1 - x2"});
  return Pencil::build(
      c, make_metric(c, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant),
      make_metric(c, {{"x2", "0"}, {"0", "x1"}}, Variance::Contravariant));
}

inline Pencil conformal_pair() {
  const Chart c = make_chart({"x1", "x2"}, {{0.5, 1.5}, {0.5, 1.5}});
  return Pencil::build(
      c, make_metric(c, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant),
      make_metric(c, {{"exp(x1*x2)", "0"}, {"0", "exp(x1*x2)"}},
                  Variance::Contravariant));
}

inline Pencil sphere_euclid_pair() {
  const Chart c = make_chart({"x1", "x2"}, {{0.9, 1.2}, {0.2, 1.0}});
  const MetricField sphere_cov =
      make_metric(c, {{"1", "0"}, {"0", "sin(x1)^2"}}, Variance::Covariant);
  const MetricField flat =
      make_metric(c, {{"1", "0"}, {"0", "1"}}, Variance::Contravariant);
  return Pencil::build(c, invert_metric(sphere_cov), flat);
}

// -- canonical multiplications ----------------------------------------------

// exponential two-dimensional structure: unity d1, d2.d2 = exp(t2) d1,
// pairing antidiagonal, Euler field t1 d1 + 2 d2, scales k = 1, D = 1
inline FMan p1_structure() {
  const Chart c = make_chart({"t1", "t2"}, {{0.1, 0.5}, {0.1, 0.4}});
  ExprT3 structure(2);
  structure.at(0, 0, 0) = Expr::constant(1.0);
  structure.at(1, 0, 1) = Expr::constant(1.0);
  structure.at(1, 1, 0) = Expr::constant(1.0);
  structure.at(0, 1, 1) = parse_expression("exp(t2)", c.coords);
  const MetricField eta =
      make_metric(c, {{"0", "1"}, {"1", "0"}}, Variance::Covariant);
  return FMan::build(c, structure, eta, make_vector(c, {"t1", "2"}), 1.0, 1.0,
                     make_vector(c, {"1", "0"}));
}

// quartic-potential structure: unity d1, d2.d2 = (t2/3) d1, antidiagonal
// pairing, Euler field t1 d1 + (2/3) t2 d2, scales k = 1, D = 5/3
inline FMan quartic_structure() {
  const Chart c = make_chart({"t1", "t2"}, {{1.0, 2.0}, {0.5, 1.5}});
  ExprT3 structure(2);
  structure.at(0, 0, 0) = Expr::constant(1.0);
  structure.at(1, 0, 1) = Expr::constant(1.0);
  structure.at(1, 1, 0) = Expr::constant(1.0);
  structure.at(0, 1, 1) = parse_expression("t2/3", c.coords);
  const MetricField eta =
      make_metric(c, {{"0", "1"}, {"1", "0"}}, Variance::Covariant);
  return FMan::build(c, structure, eta, make_vector(c, {"t1", "2*t2/3"}), 1.0,
                     5.0 / 3.0, make_vector(c, {"1", "0"}));
}

// idempotent three-dimensional structure with the Euclidean pairing
inline FMan idempotent3_structure() {
  const Chart c = make_chart({"x1", "x2", "x3"},
                             {{1.0, 2.0}, {2.5, 3.5}, {4.0, 5.0}});
  ExprT3 structure(3);
  for (int i = 0; i < 3; ++i) structure.at(i, i, i) = Expr::constant(1.0);
  const MetricField delta = make_metric(
      c, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}},
      Variance::Covariant);
  return FMan::build(c, structure, delta, make_vector(c, {"x1", "x2", "x3"}),
                     1.0, 2.0, make_vector(c, {"1", "1", "1"}));
}

// idempotent product against a non-potential diagonal pairing: the weak
// symmetry condition fails for it
inline FMan nonpotential_structure() {
  const Chart c = make_chart({"x1", "x2"}, {{1.0, 2.0}, {1.0, 2.0}});
  ExprT3 structure(2);
  structure.at(0, 0, 0) = Expr::constant(1.0);
  structure.at(1, 1, 1) = Expr::constant(1.0);
  const MetricField gt = make_metric(
      c, {{"x1*x2", "0"}, {"0", "x2^2"}}, Variance::Covariant);
  return FMan::build(c, structure, gt, make_vector(c, {"x1", "x2"}), 1.0, 4.0,
                     make_vector(c, {"1", "1"}));
}

}  // namespace pencilkit::testing
