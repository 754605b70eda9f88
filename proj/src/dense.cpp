#include "lacomp/dense.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

namespace lacomp {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r ? rows.begin()->size() : 0;
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ExecutionError("ragged matrix literal");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double frobenius(const DenseMatrix& a) {
  double s = 0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double relative_error(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return frobenius(a - b) / std::max(frobenius(b), 1e-300);
}

namespace {

void same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ExecutionError(std::string("shape mismatch in ") + op);
}

}  // namespace

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  same_shape(a, b, "addition");
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  same_shape(a, b, "subtraction");
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  return dense::gemm(a, b, nullptr, "");
}

double FlopCounter::total() const {
  double t = 0;
  for (const auto& [k, v] : by_kernel) t += v;
  return t;
}

namespace dense {

namespace {

void count(FlopCounter* fc, const std::string& k, double f) {
  if (fc) fc->add(k, f);
}

}  // namespace

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b, FlopCounter* fc, const std::string& k) {
  if (a.cols() != b.rows()) throw ExecutionError("shape mismatch in product");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      double x = a(i, l);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += x * b(l, j);
    }
  count(fc, k, 2.0 * a.rows() * a.cols() * b.cols());
  return c;
}

DenseMatrix syrk(const DenseMatrix& a, bool tn, FlopCounter* fc, const std::string& k) {
  const DenseMatrix& m = tn ? a : a.transpose();
  std::size_t n = m.cols();
  std::size_t r = m.rows();
  DenseMatrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0;
      for (std::size_t l = 0; l < r; ++l) s += m(l, i) * m(l, j);
      c(i, j) = s;
      c(j, i) = s;
    }
  count(fc, k, static_cast<double>(r) * n * (n + 1));
  return c;
}

DenseMatrix cholesky(const DenseMatrix& a, FlopCounter* fc, const std::string& k) {
  std::size_t n = a.rows();
  if (a.cols() != n) throw ExecutionError("cholesky of a non-square matrix");
  DenseMatrix l(n, n);
  double flops = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    flops += 2.0 * j + 1;
    if (!(d > 0)) throw ExecutionError("cholesky: non-positive pivot (matrix is not SPD)");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / l(j, j);
      flops += 2.0 * j + 1;
    }
  }
  count(fc, k, flops);
  return l;
}

QR householder_qr(const DenseMatrix& a, FlopCounter* fc, const std::string& k) {
  std::size_t r = a.rows();
  std::size_t c = a.cols();
  if (r < c) throw ExecutionError("QR of a wide matrix");
  DenseMatrix w = a;
  std::vector<std::vector<double>> vs;
  double flops = 0;
  for (std::size_t j = 0; j < c; ++j) {
    double norm = 0;
    for (std::size_t i = j; i < r; ++i) norm += w(i, j) * w(i, j);
    norm = std::sqrt(norm);
    std::vector<double> v(r - j, 0.0);
    for (std::size_t i = j; i < r; ++i) v[i - j] = w(i, j);
    double alpha = w(j, j) >= 0 ? -norm : norm;
    v[0] -= alpha;
    double vn = 0;
    for (double x : v) vn += x * x;
    flops += 2.0 * (r - j) * 2;
    if (vn > 0) {
      for (std::size_t col = j; col < c; ++col) {
        double s = 0;
        for (std::size_t i = j; i < r; ++i) s += v[i - j] * w(i, col);
        s = 2 * s / vn;
        for (std::size_t i = j; i < r; ++i) w(i, col) -= s * v[i - j];
      }
      flops += 4.0 * (r - j) * (c - j);
    }
    vs.push_back(std::move(v));
  }
  QR out{DenseMatrix(r, c), DenseMatrix(c, c)};
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = i; j < c; ++j) out.r(i, j) = w(i, j);
  for (std::size_t i = 0; i < c; ++i) out.q(i, i) = 1.0;
  for (std::size_t jj = c; jj-- > 0;) {
    const auto& v = vs[jj];
    double vn = 0;
    for (double x : v) vn += x * x;
    if (vn == 0) continue;
    for (std::size_t col = 0; col < c; ++col) {
      double s = 0;
      for (std::size_t i = jj; i < r; ++i) s += v[i - jj] * out.q(i, col);
      s = 2 * s / vn;
      for (std::size_t i = jj; i < r; ++i) out.q(i, col) -= s * v[i - jj];
    }
    flops += 4.0 * (r - jj) * c;
  }
  count(fc, k, flops);
  return out;
}

Eig symmetric_eig(const DenseMatrix& a, FlopCounter* fc, const std::string& k) {
  std::size_t n = a.rows();
  if (a.cols() != n) throw ExecutionError("eigendecomposition of a non-square matrix");
  DenseMatrix m = a;
  DenseMatrix z = DenseMatrix::identity(n);
  double flops = 0;
  double scale = std::max(frobenius(a), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (std::sqrt(off) <= 1e-15 * scale) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = m(p, q);
        if (apq == 0) continue;
        double theta = (m(q, q) - m(p, p)) / (2 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        double cs = 1 / std::sqrt(t * t + 1);
        double sn = t * cs;
        for (std::size_t l = 0; l < n; ++l) {
          double mp = m(l, p);
          double mq = m(l, q);
          m(l, p) = cs * mp - sn * mq;
          m(l, q) = sn * mp + cs * mq;
        }
        for (std::size_t l = 0; l < n; ++l) {
          double mp = m(p, l);
          double mq = m(q, l);
          m(p, l) = cs * mp - sn * mq;
          m(q, l) = sn * mp + cs * mq;
        }
        for (std::size_t l = 0; l < n; ++l) {
          double zp = z(l, p);
          double zq = z(l, q);
          z(l, p) = cs * zp - sn * zq;
          z(l, q) = sn * zp + cs * zq;
        }
        flops += 18.0 * n;
      }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return m(x, x) > m(y, y); });
  Eig out{DenseMatrix(n, n), DenseMatrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.w(c, c) = m(order[c], order[c]);
    for (std::size_t l = 0; l < n; ++l) out.z(l, c) = z(l, order[c]);
  }
  count(fc, k, flops);
  return out;
}

SVD svd(const DenseMatrix& a, FlopCounter* fc, const std::string& k) {
  bool wide = a.cols() > a.rows();
  DenseMatrix g = syrk(a, !wide, fc, k);
  Eig e = symmetric_eig(g, fc, k);
  std::size_t n = g.rows();
  SVD out;
  out.s = DenseMatrix(n, n);
  DenseMatrix inv_s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = std::sqrt(std::max(e.w(i, i), 0.0));
    if (s == 0) throw ExecutionError("svd: matrix is rank deficient");
    out.s(i, i) = s;
    inv_s(i, i) = 1 / s;
  }
  // The other factor is a * V * inv(S) (or a' * U * inv(S)).
  DenseMatrix other = gemm(gemm(wide ? a.transpose() : a, e.z, fc, k), inv_s, fc, k);
  if (wide) {
    out.u = e.z;
    out.v = other;
  } else {
    out.u = other;
    out.v = e.z;
  }
  return out;
}

DenseMatrix triangular_solve(const DenseMatrix& t, const DenseMatrix& b, bool left, FlopCounter* fc,
                             const std::string& k) {
  std::size_t n = t.rows();
  if (t.cols() != n) throw ExecutionError("triangular solve with a non-square matrix");
  if (!left) return triangular_solve(t.transpose(), b.transpose(), true, fc, k).transpose();
  if (b.rows() != n) throw ExecutionError("shape mismatch in triangular solve");
  bool lower = true;
  bool upper = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (j > i && t(i, j) != 0) lower = false;
      if (j < i && t(i, j) != 0) upper = false;
    }
  if (!lower && !upper) throw ExecutionError("triangular solve with a full matrix");
  DenseMatrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t i = lower ? s : n - 1 - s;
      double v = x(i, c);
      if (lower) {
        for (std::size_t j = 0; j < i; ++j) v -= t(i, j) * x(j, c);
      } else {
        for (std::size_t j = i + 1; j < n; ++j) v -= t(i, j) * x(j, c);
      }
      if (t(i, i) == 0) throw ExecutionError("triangular solve with a zero pivot");
      x(i, c) = v / t(i, i);
    }
  }
  count(fc, k, static_cast<double>(n) * n * b.cols());
  return x;
}

DenseMatrix inverse(const DenseMatrix& a) {
  std::size_t n = a.rows();
  if (a.cols() != n) throw ExecutionError("inverse of a non-square matrix");
  DenseMatrix m = a;
  DenseMatrix inv = DenseMatrix::identity(n);
  double scale = std::max(frobenius(a), 1e-300);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(m(i, c)) > std::abs(m(piv, c))) piv = i;
    if (std::abs(m(piv, c)) <= 1e-14 * scale) throw ExecutionError("inverse of a singular matrix");
    if (piv != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    double d = m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      double f = m(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

double spectral_norm(const DenseMatrix& a) {
  std::vector<double> v(a.cols(), 1.0);
  double lambda = 0;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> av(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) av[i] += a(i, j) * v[j];
    std::vector<double> w(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) w[j] += a(i, j) * av[i];
    double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    if (norm == 0) return 0;
    for (auto& x : w) x /= norm;
    v = std::move(w);
    lambda = norm;
  }
  return std::sqrt(lambda);
}

}  // namespace dense

namespace {

static_assert(std::endian::native == std::endian::little, "binary dumps assume little-endian");

}  // namespace

void write_binary(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExecutionError("cannot write " + path);
  std::uint64_t dims[2] = {m.rows(), m.cols()};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(m.data().data()),
            static_cast<std::streamsize>(m.data().size() * sizeof(double)));
}

DenseMatrix read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExecutionError("cannot read " + path);
  std::uint64_t dims[2] = {0, 0};
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  DenseMatrix m(dims[0], dims[1]);
  for (std::size_t i = 0; i < dims[0]; ++i)
    for (std::size_t j = 0; j < dims[1]; ++j) in.read(reinterpret_cast<char*>(&m(i, j)), sizeof(double));
  if (!in) throw ExecutionError("truncated matrix file " + path);
  return m;
}

}  // namespace lacomp
