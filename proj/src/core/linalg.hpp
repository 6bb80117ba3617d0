#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/chart.hpp"
#include "core/expr.hpp"

namespace pencilkit {

// Dense matrix of expressions; small n (charts are capped at dimension 4).
struct ExprMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Expr> m;

  ExprMatrix() = default;
  ExprMatrix(int r, int c) : rows(r), cols(c), m(static_cast<size_t>(r) * c) {}

  Expr& at(int i, int j) { return m[static_cast<size_t>(i) * cols + j]; }
  const Expr& at(int i, int j) const {
    return m[static_cast<size_t>(i) * cols + j];
  }

  static ExprMatrix identity(int n);
};

// Rank-3 array of expressions indexed (k, i, j); used for connection
// coefficients, structure constants and similar objects.
struct ExprT3 {
  int n = 0;
  std::vector<Expr> m;

  ExprT3() = default;
  explicit ExprT3(int dim)
      : n(dim), m(static_cast<size_t>(dim) * dim * dim) {}

  Expr& at(int k, int i, int j) {
    return m[(static_cast<size_t>(k) * n + i) * n + j];
  }
  const Expr& at(int k, int i, int j) const {
    return m[(static_cast<size_t>(k) * n + i) * n + j];
  }
};

// Rank-4 array indexed (l, k, i, j).
struct ExprT4 {
  int n = 0;
  std::vector<Expr> m;

  ExprT4() = default;
  explicit ExprT4(int dim)
      : n(dim), m(static_cast<size_t>(dim) * dim * dim * dim) {}

  Expr& at(int l, int k, int i, int j) {
    return m[((static_cast<size_t>(l) * n + k) * n + i) * n + j];
  }
  const Expr& at(int l, int k, int i, int j) const {
    return m[((static_cast<size_t>(l) * n + k) * n + i) * n + j];
  }
};

ExprMatrix matmul(const ExprMatrix& a, const ExprMatrix& b);
ExprMatrix transpose(const ExprMatrix& a);

// Cofactor-expansion determinant; fine for n <= 4.
Expr determinant(const ExprMatrix& a);

// Adjugate inverse.  Throws DimensionCap above 4x4 (the cost of symbolic
// adjugates grows too fast beyond that, and charts never need it).
ExprMatrix adjugate_inverse(const ExprMatrix& a, Expr* det_out = nullptr);

// Numeric snapshots ---------------------------------------------------------

Eigen::MatrixXd eval_matrix(const ExprMatrix& a, const Point& p);
Eigen::VectorXd eval_vector(const std::vector<Expr>& v, const Point& p);

struct NumT3 {
  int n = 0;
  std::vector<double> m;
  explicit NumT3(int dim = 0)
      : n(dim), m(static_cast<size_t>(dim) * dim * dim, 0.0) {}
  double& at(int k, int i, int j) {
    return m[(static_cast<size_t>(k) * n + i) * n + j];
  }
  double at(int k, int i, int j) const {
    return m[(static_cast<size_t>(k) * n + i) * n + j];
  }
};

struct NumT4 {
  int n = 0;
  std::vector<double> m;
  explicit NumT4(int dim = 0)
      : n(dim), m(static_cast<size_t>(dim) * dim * dim * dim, 0.0) {}
  double& at(int l, int k, int i, int j) {
    return m[((static_cast<size_t>(l) * n + k) * n + i) * n + j];
  }
  double at(int l, int k, int i, int j) const {
    return m[((static_cast<size_t>(l) * n + k) * n + i) * n + j];
  }
};

NumT3 eval_t3(const ExprT3& t, const Point& p);
NumT4 eval_t4(const ExprT4& t, const Point& p);

}  // namespace pencilkit
