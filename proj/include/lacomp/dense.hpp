#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include "lacomp/expr.hpp"

namespace lacomp {

/// Raised when a numeric kernel cannot run (non-SPD pivot, singular solve,
/// shape mismatch).
class ExecutionError : public Error {
 public:
  using Error::Error;
};

/// Row-major dense matrix of doubles. Scalars are 1x1.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  DenseMatrix transpose() const;
  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double frobenius(const DenseMatrix& a);
/// ||a - b||_F / max(||b||_F, tiny).
double relative_error(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);
/// Plain product without counting.
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

/// Cumulative FLOPs per kernel name; one multiply-add counts as two.
struct FlopCounter {
  std::map<std::string, double> by_kernel;
  void add(const std::string& kernel, double flops) { by_kernel[kernel] += flops; }
  double total() const;
};

namespace dense {

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b, FlopCounter* fc, const std::string& k);
/// a' * a (tn) or a * a' (nt); the full symmetric result is stored.
DenseMatrix syrk(const DenseMatrix& a, bool tn, FlopCounter* fc, const std::string& k);

/// Lower Cholesky factor; throws on a non-positive pivot.
DenseMatrix cholesky(const DenseMatrix& a, FlopCounter* fc = nullptr, const std::string& k = "potrf");

struct QR {
  DenseMatrix q;  // rows x cols, orthonormal columns
  DenseMatrix r;  // cols x cols, upper triangular
};
/// Householder QR of a matrix with rows >= cols.
QR householder_qr(const DenseMatrix& a, FlopCounter* fc = nullptr, const std::string& k = "geqrf");

struct Eig {
  DenseMatrix z;  // orthogonal
  DenseMatrix w;  // diagonal, descending
};
/// Cyclic Jacobi on a symmetric matrix.
Eig symmetric_eig(const DenseMatrix& a, FlopCounter* fc = nullptr, const std::string& k = "syev");

struct SVD {
  DenseMatrix u;  // rows x k
  DenseMatrix s;  // k x k diagonal
  DenseMatrix v;  // cols x k
};
/// Thin SVD through the eigendecomposition of a'a (or aa' when wide).
SVD svd(const DenseMatrix& a, FlopCounter* fc = nullptr, const std::string& k = "svd");

/// inv(t) * b (left) or b * inv(t) (right) by substitution; the triangle is
/// read from the zero pattern of t.
DenseMatrix triangular_solve(const DenseMatrix& t, const DenseMatrix& b, bool left,
                             FlopCounter* fc = nullptr, const std::string& k = "trsm");

/// Inverse by Gauss-Jordan elimination with partial pivoting.
DenseMatrix inverse(const DenseMatrix& a);

/// Largest singular value by power iteration on a'a.
double spectral_norm(const DenseMatrix& a);

}  // namespace dense

/// Raw dump: rows and cols as little-endian uint64, then row-major doubles.
void write_binary(const DenseMatrix& m, const std::string& path);
DenseMatrix read_binary(const std::string& path);

}  // namespace lacomp
