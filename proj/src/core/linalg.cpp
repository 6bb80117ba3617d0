#include "core/linalg.hpp"

namespace pencilkit {

ExprMatrix ExprMatrix::identity(int n) {
  ExprMatrix id(n, n);
  for (int i = 0; i < n; ++i) id.at(i, i) = Expr::constant(1.0);
  return id;
}

ExprMatrix matmul(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.cols != b.rows)
    throw Error(ErrorCode::Internal, "matmul dimension mismatch");
  ExprMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      Expr sum;
      for (int k = 0; k < a.cols; ++k) sum = sum + a.at(i, k) * b.at(k, j);
      out.at(i, j) = sum;
    }
  return out;
}

ExprMatrix transpose(const ExprMatrix& a) {
  ExprMatrix out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

namespace {

ExprMatrix minor_matrix(const ExprMatrix& a, int drop_row, int drop_col) {
  ExprMatrix out(a.rows - 1, a.cols - 1);
  int r = 0;
  for (int i = 0; i < a.rows; ++i) {
    if (i == drop_row) continue;
    int c = 0;
    for (int j = 0; j < a.cols; ++j) {
      if (j == drop_col) continue;
      out.at(r, c) = a.at(i, j);
      ++c;
    }
    ++r;
  }
  return out;
}

}  // namespace

Expr determinant(const ExprMatrix& a) {
  if (a.rows != a.cols)
    throw Error(ErrorCode::Internal, "determinant of a non-square matrix");
  const int n = a.rows;
  if (n == 0) return Expr::constant(1.0);
  if (n == 1) return a.at(0, 0);
  if (n == 2)
    return a.at(0, 0) * a.at(1, 1) - a.at(0, 1) * a.at(1, 0);
  Expr det;
  for (int j = 0; j < n; ++j) {
    Expr term = a.at(0, j) * determinant(minor_matrix(a, 0, j));
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

ExprMatrix adjugate_inverse(const ExprMatrix& a, Expr* det_out) {
  if (a.rows != a.cols)
    throw Error(ErrorCode::Internal, "inverse of a non-square matrix");
  if (a.rows > 4)
    throw Error(ErrorCode::DimensionCap,
                "symbolic inversion is capped at dimension 4");
  const int n = a.rows;
  const Expr det = determinant(a).simplified();
  if (det.is_zero())
    throw Error(ErrorCode::SingularMetric, "matrix is identically singular");
  if (det_out) *det_out = det;
  ExprMatrix inv(n, n);
  if (n == 1) {
    inv.at(0, 0) = Expr::constant(1.0) / det;
    return inv;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr cof = determinant(minor_matrix(a, j, i));
      if ((i + j) % 2 == 1) cof = -cof;
      inv.at(i, j) = (cof / det).simplified();
    }
  return inv;
}

Eigen::MatrixXd eval_matrix(const ExprMatrix& a, const Point& p) {
  Eigen::MatrixXd out(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out(i, j) = a.at(i, j).evaluate(p);
  return out;
}

Eigen::VectorXd eval_vector(const std::vector<Expr>& v, const Point& p) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v[i].evaluate(p);
  return out;
}

NumT3 eval_t3(const ExprT3& t, const Point& p) {
  NumT3 out(t.n);
  for (size_t i = 0; i < t.m.size(); ++i) out.m[i] = t.m[i].evaluate(p);
  return out;
}

NumT4 eval_t4(const ExprT4& t, const Point& p) {
  NumT4 out(t.n);
  for (size_t i = 0; i < t.m.size(); ++i) out.m[i] = t.m[i].evaluate(p);
  return out;
}

}  // namespace pencilkit
