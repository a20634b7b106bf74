#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cellfree {

/// Dense row-major double matrix. Deliberately minimal: storage plus the
/// handful of kernels the networks and the channel model need.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }

  size_t size() const { return a.size(); }
  void fill(double v) { std::fill(a.begin(), a.end(), v); }

  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

/// C = A * B^T.  A is m x k, B is n x k, C is m x n.
void matmul_nt(const Mat& A, const Mat& B, Mat& C);

/// C = A^T * B.  A is k x m, B is k x n, C is m x n.
void matmul_tn(const Mat& A, const Mat& B, Mat& C);

/// C = A * B.  A is m x k, B is k x n, C is m x n.
void matmul_nn(const Mat& A, const Mat& B, Mat& C);

/// Row-major complex matrix, used on the pilot/estimation plane.
struct CMat {
  int rows = 0;
  int cols = 0;
  std::vector<std::complex<double>> a;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

  std::complex<double>& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const std::complex<double>& operator()(int r, int c) const {
    return a[static_cast<size_t>(r) * cols + c];
  }
};

/// Solves A x = b for complex square A by LU with partial pivoting.
/// A and b are clobbered; the solution lands in b.
void solve_inplace(CMat& A, std::vector<std::complex<double>>& b);

}  // namespace cellfree
