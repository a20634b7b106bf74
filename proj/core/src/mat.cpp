#include "cellfree/mat.hpp"

#include <cmath>

#include "cellfree/errors.hpp"

namespace cellfree {

void matmul_nt(const Mat& A, const Mat& B, Mat& C) {
  if (A.cols != B.cols) throw DimensionError("matmul_nt: inner dimensions differ");
  C = Mat(A.rows, B.rows);
  const int k = A.cols;
  for (int i = 0; i < A.rows; ++i) {
    const double* ai = A.row(i);
    double* ci = C.row(i);
    for (int j = 0; j < B.rows; ++j) {
      const double* bj = B.row(j);
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += ai[t] * bj[t];
      ci[j] = acc;
    }
  }
}

void matmul_tn(const Mat& A, const Mat& B, Mat& C) {
  if (A.rows != B.rows) throw DimensionError("matmul_tn: inner dimensions differ");
  C = Mat(A.cols, B.cols);
  for (int t = 0; t < A.rows; ++t) {
    const double* at = A.row(t);
    const double* bt = B.row(t);
    for (int i = 0; i < A.cols; ++i) {
      const double v = at[i];
      if (v == 0.0) continue;
      double* ci = C.row(i);
      for (int j = 0; j < B.cols; ++j) ci[j] += v * bt[j];
    }
  }
}

void matmul_nn(const Mat& A, const Mat& B, Mat& C) {
  if (A.cols != B.rows) throw DimensionError("matmul_nn: inner dimensions differ");
  C = Mat(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i) {
    const double* ai = A.row(i);
    double* ci = C.row(i);
    for (int t = 0; t < A.cols; ++t) {
      const double v = ai[t];
      if (v == 0.0) continue;
      const double* bt = B.row(t);
      for (int j = 0; j < B.cols; ++j) ci[j] += v * bt[j];
    }
  }
}

void solve_inplace(CMat& A, std::vector<std::complex<double>>& b) {
  const int n = A.rows;
  if (A.cols != n || static_cast<int>(b.size()) != n) {
    throw DimensionError("solve_inplace: shape mismatch");
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(A(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(A(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw NumericalError("solve_inplace: singular matrix");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A(piv, c), A(col, c));
      std::swap(b[piv], b[col]);
    }
    const std::complex<double> d = A(col, col);
    for (int r = col + 1; r < n; ++r) {
      const std::complex<double> f = A(r, col) / d;
      if (f == std::complex<double>(0.0, 0.0)) continue;
      A(r, col) = 0.0;
      for (int c = col + 1; c < n; ++c) A(r, c) -= f * A(col, c);
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    std::complex<double> acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= A(r, c) * b[c];
    b[r] = acc / A(r, r);
  }
}

}  // namespace cellfree
