#pragma once

// Dense matrix container and symmetric eigensolvers.
//
// The tridiagonal solver is the implicit-shift QL iteration (EISPACK tql2
// lineage); the dense path reduces to tridiagonal form with Householder
// reflections first (tred2 lineage).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "dvrforge/error.hpp"

namespace dvrforge {

/// Row-major dense real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

inline std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ShapeError("multiply: vector length differs from column count");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

/// y = Aᵀ x
inline std::vector<double> multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw ShapeError("multiply_transposed: vector length differs from row count");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
  }
  return y;
}

/// max_ij |A_ij - B_ij|
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("max_abs_diff: shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

/// max_ij |(AᵀA - I)_ij|
inline double orthogonality_defect(const Matrix& a) {
  const std::size_t n = a.cols();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

enum class VectorMode { None, FirstRow, Full };

struct EigenResult {
  std::vector<double> values;  // ascending
  /// Full: column j is the eigenvector of values[j].
  /// FirstRow: a 1×n matrix holding the first component of every eigenvector.
  Matrix vectors;
  int max_iterations_used = 0;
};

struct EigenOptions {
  double relative_tolerance = 1e-14;
  int max_iterations_per_value = 50;
  VectorMode vectors = VectorMode::Full;
};

namespace detail {

// QL with implicit shifts on (d, e), e[i] coupling i and i+1, e.size() == n
// with e[n-1] unused. `z` receives the rotations (rows x n); nullptr skips them.
inline int tql2(std::vector<double>& d, std::vector<double>& e, Matrix* z, const EigenOptions& opt) {
  const std::size_t n = d.size();
  if (n == 0) return 0;
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    norm = std::max(norm, std::abs(d[i]) + std::abs(e[i]) + (i > 0 ? std::abs(e[i - 1]) : 0.0));
  const double tol = opt.relative_tolerance * (norm > 0.0 ? norm : 1.0);
  e[n - 1] = 0.0;
  int worst = 0;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      std::size_t m = l;
      while (m < n - 1 && std::abs(e[m]) > tol) ++m;
      if (m == l) break;
      if (++iter > opt.max_iterations_per_value) {
        std::ostringstream msg;
        msg << "tridiagonal QL did not converge for eigenvalue " << l << " after "
            << opt.max_iterations_per_value << " iterations (|e| = " << std::abs(e[l]) << ", tol = " << tol << ")";
        throw NumericError(msg.str());
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? r : -r));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z != nullptr) {
          for (std::size_t k = 0; k < z->rows(); ++k) {
            f = (*z)(k, i + 1);
            (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
            (*z)(k, i) = c * (*z)(k, i) - s * f;
          }
        }
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
    worst = std::max(worst, iter);
  }
  return worst;
}

// Householder reduction of symmetric a (overwritten by the accumulated
// orthogonal transform) to tridiagonal (d, e) with e[i] coupling i, i+1.
inline void tred2(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  if (n == 0) return;
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0, h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k < i; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k < i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  // shift so e[i] couples i and i+1
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
}

inline void sort_ascending(EigenResult& r) {
  const std::size_t n = r.values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.values[a] < r.values[b]; });
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = r.values[order[i]];
  if (r.vectors.rows() > 0) {
    Matrix vecs(r.vectors.rows(), n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < r.vectors.rows(); ++k) vecs(k, j) = r.vectors(k, order[j]);
    r.vectors = std::move(vecs);
  }
  r.values = std::move(vals);
}

}  // namespace detail

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal (length n) and off-diagonal (length n-1).
inline EigenResult tridiagonal_eigen(std::span<const double> diagonal, std::span<const double> off_diagonal,
                                     const EigenOptions& opt = {}) {
  const std::size_t n = diagonal.size();
  if (n > 0 && off_diagonal.size() + 1 != n) throw ShapeError("tridiagonal_eigen: off-diagonal must have n-1 entries");
  std::vector<double> d(diagonal.begin(), diagonal.end());
  std::vector<double> e(n, 0.0);
  std::copy(off_diagonal.begin(), off_diagonal.end(), e.begin());
  EigenResult r;
  Matrix z;
  if (opt.vectors == VectorMode::Full) {
    z = Matrix::identity(n);
  } else if (opt.vectors == VectorMode::FirstRow) {
    z = Matrix(1, n);
    if (n > 0) z(0, 0) = 1.0;
  }
  r.max_iterations_used = detail::tql2(d, e, opt.vectors == VectorMode::None ? nullptr : &z, opt);
  r.values = std::move(d);
  r.vectors = std::move(z);
  detail::sort_ascending(r);
  return r;
}

/// Eigen-decomposition of a dense symmetric matrix (only the lower triangle is read).
inline EigenResult symmetric_eigen(const Matrix& a, const EigenOptions& opt = {}) {
  if (a.rows() != a.cols()) throw ShapeError("symmetric_eigen: matrix must be square");
  const std::size_t n = a.rows();
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) v(i, j) = v(j, i) = a(i, j);
  std::vector<double> d, e;
  detail::tred2(v, d, e);
  EigenResult r;
  r.max_iterations_used = detail::tql2(d, e, &v, opt);
  r.values = std::move(d);
  r.vectors = std::move(v);
  detail::sort_ascending(r);
  return r;
}

}  // namespace dvrforge
