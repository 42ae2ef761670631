#pragma once

// The DVR transformation matrix T_{pq} = N_q sqrt(w_p) p_q(x_p) (row p = grid
// point, column q = basis function), FBR <-> DVR transforms, direct-product
// transforms and the DVR Schrödinger problem.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dvrforge/error.hpp"
#include "dvrforge/linalg.hpp"
#include "dvrforge/parallel.hpp"
#include "dvrforge/polyfam.hpp"
#include "dvrforge/quadrature.hpp"

namespace dvrforge {

struct DvrMatrix {
  PolynomialFamily family;
  std::size_t N = 0;
  Matrix entries;  // entries(p, q)
  Quadrature quadrature;
  RecurrenceCoeffs coeffs;
  double unitarity_defect = 0.0;
  std::vector<std::string> warnings;

  double operator()(std::size_t p, std::size_t q) const { return entries(p, q); }
};

inline constexpr double kUnitarityWarning = 1e-6;

/// Builds T row by row with the column recurrence
///     T_{p,q} = (A_q + B_q x_p) T_{p,q-1} + C_q T_{p,q-2}.
/// The seed T_{p,0} = N_0 sqrt(w_p) is fixed through unit row norm
/// (Σ_q T_{pq}² = w_p Σ_q φ_q(x_p)² = 1), which stays representable where w_p
/// itself underflows.
inline DvrMatrix build_dvr(const PolynomialFamily& f, std::size_t N, const QuadratureOptions& qopt = {}) {
  if (N < 1) throw ParameterError("build_dvr: N must be >= 1");
  DvrMatrix t{f, N, Matrix(N, N), nodes_weights(f, N, qopt), recurrence_coeffs(f, std::max<std::size_t>(N, 1)), 0.0, {}};
  const auto& rc = t.coeffs;
  for (std::size_t p = 0; p < N; ++p) {
    auto row = t.entries.row(p);
    const double x = t.quadrature.nodes[p];
    row[0] = 1.0;
    for (std::size_t q = 1; q < N; ++q) {
      row[q] = (rc.column_A[q] + rc.column_B[q] * x) * row[q - 1] + (q >= 2 ? rc.column_C[q] * row[q - 2] : 0.0);
      if (std::abs(row[q]) > 1e150)
        for (std::size_t k = 0; k <= q; ++k) row[k] *= 1e-150;
    }
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : row) v /= norm;
  }
  t.unitarity_defect = orthogonality_defect(t.entries);
  if (t.unitarity_defect > kUnitarityWarning) {
    std::ostringstream os;
    os << "unitarity defect " << t.unitarity_defect << " exceeds " << kUnitarityWarning;
    t.warnings.push_back(os.str());
  }
  return t;
}

/// T from the eigenvectors of the position matrix, each eigenvector signed so
/// its first nonzero component is positive.
inline Matrix dvr_from_position_operator(const PolynomialFamily& f, std::size_t N) {
  const auto x = position_matrix(f, N);
  const auto eig = tridiagonal_eigen(x.diagonal, x.off_diagonal);
  Matrix t(N, N);
  for (std::size_t p = 0; p < N; ++p) {
    double sign = 1.0;
    for (std::size_t q = 0; q < N; ++q) {
      if (eig.vectors(q, p) != 0.0) {
        sign = eig.vectors(q, p) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t q = 0; q < N; ++q) t(p, q) = sign * eig.vectors(q, p);
  }
  return t;
}

/// max |T_{pq} - (-1)^q T_{N-1-p,q}|
inline double parity_residual(const DvrMatrix& t) {
  double worst = 0.0;
  for (std::size_t p = 0; p < t.N; ++p)
    for (std::size_t q = 0; q < t.N; ++q) {
      const double sign = (q % 2 == 0) ? 1.0 : -1.0;
      worst = std::max(worst, std::abs(t(p, q) - sign * t(t.N - 1 - p, q)));
    }
  return worst;
}

/// d_l(x) = Σ_q T_{lq} φ_q(x), φ_q(x) = N_q p_q(x) sqrt(ω(x)).
inline double dvr_basis_value(const DvrMatrix& t, std::size_t l, double x) {
  if (l >= t.N) throw ParameterError("dvr_basis_value: l out of range");
  if (!t.family.support().contains(x)) throw DomainError("dvr_basis_value: x outside support");
  const auto phi = basis_functions(t.family, t.coeffs, t.N, x);
  double s = 0.0;
  for (std::size_t q = 0; q < t.N; ++q) s += t(l, q) * phi[q];
  return s;
}

/// Largest |d_l(x_k)|, l != k, relative to max_l |d_l(x_l)|.
inline double kronecker_residual(const DvrMatrix& t) {
  double off = 0.0, diag = 0.0;
  for (std::size_t k = 0; k < t.N; ++k) {
    const auto phi = basis_functions(t.family, t.coeffs, t.N, t.quadrature.nodes[k]);
    for (std::size_t l = 0; l < t.N; ++l) {
      double s = 0.0;
      for (std::size_t q = 0; q < t.N; ++q) s += t(l, q) * phi[q];
      if (l == k)
        diag = std::max(diag, std::abs(s));
      else
        off = std::max(off, std::abs(s));
    }
  }
  return diag > 0.0 ? off / diag : off;
}

inline std::vector<double> fbr_to_dvr(const DvrMatrix& t, std::span<const double> fbr) {
  if (fbr.size() != t.N) throw ShapeError("fbr_to_dvr: vector length must equal N");
  return multiply(t.entries, fbr);
}

inline std::vector<double> dvr_to_fbr(const DvrMatrix& t, std::span<const double> dvr) {
  if (dvr.size() != t.N) throw ShapeError("dvr_to_fbr: vector length must equal N");
  return multiply_transposed(t.entries, dvr);
}

enum class Direction { FbrToDvr, DvrToFbr };

/// Applies T^(1) ⊗ ... ⊗ T^(D) (or the transposes) to a row-major state with
/// axis 0 slowest, one axis at a time.
inline std::vector<double> tensor_apply(std::span<const DvrMatrix* const> dims, std::span<const double> state,
                                        Direction dir = Direction::FbrToDvr) {
  std::size_t total = 1;
  for (const auto* d : dims) total *= d->N;
  if (state.size() != total) throw ShapeError("tensor_apply: state length must equal the product of axis sizes");
  std::vector<double> cur(state.begin(), state.end()), next(total);
  std::size_t outer = 1;
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const auto& t = dims[axis]->entries;
    const std::size_t n = dims[axis]->N;
    const std::size_t inner = total / (outer * n);
    parallel_for(outer, [&](std::size_t o) {
      for (std::size_t i = 0; i < inner; ++i) {
        for (std::size_t p = 0; p < n; ++p) {
          double s = 0.0;
          for (std::size_t q = 0; q < n; ++q) {
            const double coef = dir == Direction::FbrToDvr ? t(p, q) : t(q, p);
            s += coef * cur[(o * n + q) * inner + i];
          }
          next[(o * n + p) * inner + i] = s;
        }
      }
    });
    std::swap(cur, next);
    outer *= n;
  }
  return cur;
}

inline std::vector<double> tensor_apply(const std::vector<DvrMatrix>& dims, std::span<const double> state,
                                        Direction dir = Direction::FbrToDvr) {
  std::vector<const DvrMatrix*> ptrs;
  for (const auto& d : dims) ptrs.push_back(&d);
  return tensor_apply(std::span<const DvrMatrix* const>(ptrs), state, dir);
}

/// Σ_k (w_k/ω(x_k)) d_i(x_k) V(x_k) d_j(x_k), the quadrature DVR potential matrix.
inline Matrix quadrature_potential_matrix(const DvrMatrix& t, const std::function<double(double)>& v) {
  const std::size_t n = t.N;
  Matrix d(n, n);  // d(i, k) = d_i(x_k)
  for (std::size_t k = 0; k < n; ++k) {
    const auto phi = basis_functions(t.family, t.coeffs, n, t.quadrature.nodes[k]);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t q = 0; q < n; ++q) s += t(i, q) * phi[q];
      d(i, k) = s;
    }
  }
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = t.quadrature.nodes[k];
    const double scale = t.quadrature.weights[k] / weight_function(t.family, xk) * v(xk);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += scale * d(i, k) * d(j, k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schrödinger problem in DVR

/// K^VBR = p²/2 in the harmonic-oscillator basis (ħ = m = ω = 1), i.e. the
/// Hermite family with φ_j = N_j H_j(x) e^{-x²/2}.
inline Matrix harmonic_kinetic_vbr(std::size_t n) {
  Matrix k(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    k(j, j) = (2.0 * static_cast<double>(j) + 1.0) / 4.0;
    if (j + 2 < n) {
      const double off = -std::sqrt(static_cast<double>((j + 1) * (j + 2))) / 4.0;
      k(j, j + 2) = off;
      k(j + 2, j) = off;
    }
  }
  return k;
}

struct DvrHamiltonian {
  std::vector<DvrMatrix> dims;
  std::vector<Matrix> kinetic_vbr;    // one per dimension
  std::vector<double> potential_diag; // V at the direct-product grid, row-major
};

using Potential = std::function<double(std::span<const double>)>;

inline Potential harmonic_potential() {
  return [](std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += 0.5 * xi * xi;
    return s;
  };
}

inline Potential quartic_potential(double lambda) {
  return [lambda](std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += 0.5 * xi * xi + lambda * xi * xi * xi * xi;
    return s;
  };
}

/// Assembles H from per-axis DVRs, per-axis kinetic matrices and a potential
/// evaluated on the direct-product grid.
inline DvrHamiltonian make_hamiltonian(std::vector<DvrMatrix> dims, std::vector<Matrix> kinetic,
                                       const Potential& potential) {
  if (dims.empty()) throw ParameterError("make_hamiltonian: need at least one dimension");
  if (kinetic.size() != dims.size()) throw ShapeError("make_hamiltonian: one kinetic matrix per dimension");
  std::size_t total = 1;
  for (std::size_t c = 0; c < dims.size(); ++c) {
    if (kinetic[c].rows() != dims[c].N || kinetic[c].cols() != dims[c].N)
      throw ShapeError("make_hamiltonian: kinetic matrix size differs from axis size");
    for (std::size_t i = 0; i < dims[c].N; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(kinetic[c](i, j) - kinetic[c](j, i)) > 1e-12 * (1.0 + std::abs(kinetic[c](i, j))))
          throw ParameterError("make_hamiltonian: kinetic matrix is not symmetric");
    total *= dims[c].N;
  }
  std::vector<double> v(total);
  std::vector<double> point(dims.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t c = dims.size(); c-- > 0;) {
      point[c] = dims[c].quadrature.nodes[rem % dims[c].N];
      rem /= dims[c].N;
    }
    v[idx] = potential(point);
  }
  return DvrHamiltonian{std::move(dims), std::move(kinetic), std::move(v)};
}

/// Dense DVR Hamiltonian Σ_c (I ⊗ T_c K_c T_cᵀ ⊗ I) + diag(V).
inline Matrix dvr_hamiltonian_matrix(const DvrHamiltonian& h) {
  std::size_t total = 1;
  for (const auto& d : h.dims) total *= d.N;
  if (h.potential_diag.size() != total) throw ShapeError("dvr_hamiltonian_matrix: potential size mismatch");
  Matrix out(total, total);
  std::size_t outer = 1;
  for (std::size_t c = 0; c < h.dims.size(); ++c) {
    const std::size_t n = h.dims[c].N;
    const std::size_t inner = total / (outer * n);
    const Matrix kd = multiply(multiply(h.dims[c].entries, h.kinetic_vbr[c]), h.dims[c].entries.transposed());
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i)
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q) out((o * n + p) * inner + i, (o * n + q) * inner + i) += kd(p, q);
    outer *= n;
  }
  for (std::size_t i = 0; i < total; ++i) out(i, i) += h.potential_diag[i];
  return out;
}

struct Eigenpairs {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j belongs to values[j]
};

inline Eigenpairs solve_schrodinger(const DvrHamiltonian& h, std::size_t n_eigs) {
  const Matrix hm = dvr_hamiltonian_matrix(h);
  if (n_eigs > hm.rows()) throw ParameterError("solve_schrodinger: n_eigs exceeds the problem dimension");
  const auto eig = symmetric_eigen(hm);
  Eigenpairs out;
  out.values.assign(eig.values.begin(), eig.values.begin() + static_cast<std::ptrdiff_t>(n_eigs));
  out.vectors = Matrix(hm.rows(), n_eigs);
  for (std::size_t i = 0; i < hm.rows(); ++i)
    for (std::size_t j = 0; j < n_eigs; ++j) out.vectors(i, j) = eig.vectors(i, j);
  return out;
}

/// Hermite-basis oscillator problem in `dims` dimensions with N points per axis.
inline Eigenpairs solve_hermite(std::size_t N, std::size_t dims, const Potential& v, std::size_t n_eigs) {
  std::vector<DvrMatrix> axes;
  std::vector<Matrix> kin;
  for (std::size_t c = 0; c < dims; ++c) {
    axes.push_back(build_dvr(PolynomialFamily::hermite(), N));
    kin.push_back(harmonic_kinetic_vbr(N));
  }
  return solve_schrodinger(make_hamiltonian(std::move(axes), std::move(kin), v), n_eigs);
}

struct ConvergenceRow {
  std::size_t N = 0;
  std::vector<double> values;
  double max_error = 0.0;  // vs the reference ladder entry
};

/// Lowest n_eigs eigenvalues across an N-ladder against a reference size.
inline std::vector<ConvergenceRow> convergence_ladder(std::span<const std::size_t> ladder, std::size_t reference_n,
                                                      const Potential& v, std::size_t n_eigs) {
  const auto ref = solve_hermite(reference_n, 1, v, n_eigs);
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : ladder) {
    ConvergenceRow r;
    r.N = n;
    r.values = solve_hermite(n, 1, v, n_eigs).values;
    for (std::size_t i = 0; i < n_eigs; ++i) r.max_error = std::max(r.max_error, std::abs(r.values[i] - ref.values[i]));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dvrforge
