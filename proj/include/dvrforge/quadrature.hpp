#pragma once

// Gaussian quadrature rules from the tridiagonal position-operator matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "dvrforge/error.hpp"
#include "dvrforge/linalg.hpp"
#include "dvrforge/polyfam.hpp"

namespace dvrforge {

/// Symmetric tridiagonal matrix of x in the orthonormal polynomial basis.
struct PositionMatrix {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  Matrix dense() const {
    const std::size_t n = diagonal.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = diagonal[i];
    for (std::size_t i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = off_diagonal[i];
    return m;
  }
};

/// x φ_{q-1} = (φ_q - A_q φ_{q-1} - C_q φ_{q-2}) / B_q, so the diagonal is
/// -A_q/B_q and the coupling of rows q-1, q is 1/B_q.
inline PositionMatrix position_matrix(const RecurrenceCoeffs& rc, std::size_t N) {
  if (N < 1) throw ParameterError("position_matrix: N must be >= 1");
  if (rc.max_degree() < N) throw ParameterError("position_matrix: coefficients must reach degree N");
  PositionMatrix x;
  x.diagonal.resize(N);
  x.off_diagonal.resize(N - 1);
  for (std::size_t q = 1; q <= N; ++q) x.diagonal[q - 1] = -rc.column_A[q] / rc.column_B[q];
  for (std::size_t q = 1; q < N; ++q) x.off_diagonal[q - 1] = 1.0 / rc.column_B[q];
  return x;
}

inline PositionMatrix position_matrix(const PolynomialFamily& f, std::size_t N) {
  return position_matrix(recurrence_coeffs(f, std::max<std::size_t>(N, 1)), N);
}

struct Quadrature {
  PolynomialFamily family;
  std::size_t n_points = 0;
  std::vector<double> nodes;    // strictly ascending
  std::vector<double> weights;  // strictly positive
  int eigen_iterations = 0;
};

enum class WeightRoute {
  /// First components of the eigenvectors, evaluated from the recurrence at
  /// each converged eigenvalue (keeps relative accuracy on tiny weights).
  EigenvectorRecurrence,
  /// First components accumulated from the QL rotations themselves.
  QlRotations,
};

struct QuadratureOptions {
  WeightRoute weights = WeightRoute::EigenvectorRecurrence;
  bool polish_nodes = true;
  bool symmetrize = true;
  EigenOptions eigen{};
};

namespace detail {

// Scaled evaluation of φ_0..φ_n (orthonormal, no weight factor) and φ_n' at x.
struct ScaledEval {
  double phi_n = 0.0, dphi_n = 0.0, phi_nm1 = 0.0;
  double sum_sq_below_n = 0.0;  // Σ_{q<n} φ_q², in the same scale squared
  double log_scale = 0.0;       // actual = stored * exp(log_scale)
};

inline ScaledEval scaled_eval(const RecurrenceCoeffs& rc, std::size_t n, double x) {
  ScaledEval r;
  r.log_scale = -0.5 * rc.log_norm_sq[0];
  double p_prev = 0.0, p_cur = 1.0, d_prev = 0.0, d_cur = 0.0;
  double sum_sq = 1.0;
  for (std::size_t q = 1; q <= n; ++q) {
    const double lin = rc.column_A[q] + rc.column_B[q] * x;
    const double cq = q >= 2 ? rc.column_C[q] : 0.0;
    const double p_next = lin * p_cur + cq * p_prev;
    const double d_next = rc.column_B[q] * p_cur + lin * d_cur + cq * d_prev;
    p_prev = p_cur;
    p_cur = p_next;
    d_prev = d_cur;
    d_cur = d_next;
    if (q < n) sum_sq += p_cur * p_cur;
    const double big = std::max(std::abs(p_cur), std::abs(d_cur));
    if (big > 1e100) {
      p_prev *= 1e-100;
      p_cur *= 1e-100;
      d_prev *= 1e-100;
      d_cur *= 1e-100;
      sum_sq *= 1e-200;
      r.log_scale += 100.0 * std::numbers::ln10;
    }
  }
  r.phi_n = p_cur;
  r.dphi_n = d_cur;
  r.phi_nm1 = p_prev;
  r.sum_sq_below_n = sum_sq;
  return r;
}

}  // namespace detail

/// Christoffel-type weight w = B_N / (φ_N'(x) φ_{N-1}(x)) in orthonormal
/// variables; equivalent to (k_N/k_{N-1}) ||p_{N-1}||² / (p_N'(x) p_{N-1}(x))
/// with k the leading coefficients.
inline double explicit_weight(const RecurrenceCoeffs& rc, std::size_t N, double x) {
  const auto e = detail::scaled_eval(rc, N, x);
  // both factors carry the same scale
  return rc.column_B[N] / (e.dphi_n * e.phi_nm1) * std::exp(-2.0 * e.log_scale);
}

inline double explicit_weight(const PolynomialFamily& f, std::size_t N, double x) {
  return explicit_weight(recurrence_coeffs(f, std::max<std::size_t>(N, 1)), N, x);
}

inline Quadrature nodes_weights(const PolynomialFamily& f, std::size_t N, const QuadratureOptions& opt = {}) {
  if (N < 1) throw ParameterError("nodes_weights: N must be >= 1");
  const auto rc = recurrence_coeffs(f, N);
  const auto x = position_matrix(rc, N);

  EigenOptions eo = opt.eigen;
  eo.vectors = opt.weights == WeightRoute::QlRotations ? VectorMode::FirstRow : VectorMode::None;
  auto eig = tridiagonal_eigen(x.diagonal, x.off_diagonal, eo);

  Quadrature q{f, N, std::move(eig.values), std::vector<double>(N, 0.0), eig.max_iterations_used};
  const double mu0 = std::exp(rc.log_norm_sq[0]);
  const Interval sup = f.support();

  if (opt.polish_nodes) {
    for (std::size_t k = 0; k < N; ++k) {
      double& xk = q.nodes[k];
      const double gap = [&] {
        double g = std::numeric_limits<double>::infinity();
        if (k > 0) g = std::min(g, xk - q.nodes[k - 1]);
        if (k + 1 < N) g = std::min(g, q.nodes[k + 1] - xk);
        return std::isfinite(g) ? g : 1.0;
      }();
      for (int it = 0; it < 3; ++it) {
        const auto e = detail::scaled_eval(rc, N, xk);
        if (e.dphi_n == 0.0) break;
        const double step = e.phi_n / e.dphi_n;
        if (!std::isfinite(step) || std::abs(step) > 1e-3 * gap) break;
        xk -= step;
        if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(xk))) break;
      }
      xk = std::clamp(xk, sup.lower, sup.upper);
    }
  }

  if (opt.weights == WeightRoute::QlRotations) {
    for (std::size_t k = 0; k < N; ++k) q.weights[k] = mu0 * eig.vectors(0, k) * eig.vectors(0, k);
  } else {
    // normalized eigenvector (φ_0..φ_{N-1})/||·||, first component φ_0 = N_0
    for (std::size_t k = 0; k < N; ++k) {
      const auto e = detail::scaled_eval(rc, N, q.nodes[k]);
      // w = N_0² / (N_0² Σ φ²/φ_0²) scaled: Σ_q φ_q(x)² = 1/w
      q.weights[k] = std::exp(-std::log(e.sum_sq_below_n) - 2.0 * e.log_scale);
    }
  }

  if (opt.symmetrize && f.is_parity_conserving()) {
    for (std::size_t k = 0; k < N / 2; ++k) {
      const std::size_t m = N - 1 - k;
      const double xs = 0.5 * (q.nodes[m] - q.nodes[k]);
      const double ws = 0.5 * (q.weights[m] + q.weights[k]);
      q.nodes[k] = -xs;
      q.nodes[m] = xs;
      q.weights[k] = q.weights[m] = ws;
    }
    if (N % 2 == 1) q.nodes[N / 2] = 0.0;
  }
  return q;
}

/// Σ w_k f(x_k)
inline double quadrature_apply(const Quadrature& q, const std::function<double(double)>& fn) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.n_points; ++k) s += q.weights[k] * fn(q.nodes[k]);
  return s;
}

}  // namespace dvrforge
