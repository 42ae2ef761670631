#pragma once

// Classical orthogonal-polynomial families and the recurrences of the
// normalized DVR columns derived from them.
//
// Polynomials are stored in their classical normalization,
//     p_q(x) = (a_q + b_q x) p_{q-1}(x) + c_q p_{q-2}(x),   p_0 = 1, p_{-1} = 0,
// and normalized quantities go through N_q = 1 / ||p_q||.  The column
// recurrence of the DVR matrix
//     T_{p,q} = (A_q + B_q x_p) T_{p,q-1} + C_q T_{p,q-2}
// uses A_q = (N_q/N_{q-1}) a_q, B_q = (N_q/N_{q-1}) b_q, C_q = (N_q/N_{q-2}) c_q.
// Index 0 of every coefficient sequence is a placeholder (zero).

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dvrforge/error.hpp"
#include "dvrforge/format.hpp"
#include "dvrforge/segment.hpp"

namespace dvrforge {

enum class FamilyKind { Hermite, Laguerre, Legendre, ChebyshevFirst, ChebyshevSecond, Jacobi };

struct Interval {
  double lower;
  double upper;
  bool contains(double x) const { return x >= lower && x <= upper; }
};

/// One orthogonal-polynomial class. `alpha` is used by Laguerre and Jacobi,
/// `beta` by Jacobi only.
class PolynomialFamily {
 public:
  static PolynomialFamily hermite() { return PolynomialFamily(FamilyKind::Hermite); }
  static PolynomialFamily legendre() { return PolynomialFamily(FamilyKind::Legendre); }
  static PolynomialFamily chebyshev_first() { return PolynomialFamily(FamilyKind::ChebyshevFirst); }
  static PolynomialFamily chebyshev_second() { return PolynomialFamily(FamilyKind::ChebyshevSecond); }

  static PolynomialFamily laguerre(double alpha = 0.0) {
    if (!(alpha > -1.0)) throw ParameterError("laguerre: alpha must be > -1");
    PolynomialFamily f(FamilyKind::Laguerre);
    f.alpha_ = alpha;
    return f;
  }

  static PolynomialFamily jacobi(double alpha, double beta) {
    if (!(alpha > -1.0) || !(beta > -1.0)) throw ParameterError("jacobi: alpha and beta must be > -1");
    PolynomialFamily f(FamilyKind::Jacobi);
    f.alpha_ = alpha;
    f.beta_ = beta;
    return f;
  }

  FamilyKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  Interval support() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
      case FamilyKind::Hermite: return {-inf, inf};
      case FamilyKind::Laguerre: return {0.0, inf};
      default: return {-1.0, 1.0};
    }
  }

  /// True exactly when the free recurrence term a_q vanishes for every q.
  bool is_parity_conserving() const {
    switch (kind_) {
      case FamilyKind::Laguerre: return false;
      case FamilyKind::Jacobi: return alpha_ == beta_;
      default: return true;
    }
  }

  /// Canonical textual tag, parseable by parse_family.
  std::string tag() const {
    switch (kind_) {
      case FamilyKind::Hermite: return "hermite";
      case FamilyKind::Legendre: return "legendre";
      case FamilyKind::ChebyshevFirst: return "chebyshev1";
      case FamilyKind::ChebyshevSecond: return "chebyshev2";
      case FamilyKind::Laguerre: return "laguerre:" + shortest_repr(alpha_);
      case FamilyKind::Jacobi: return "jacobi:" + shortest_repr(alpha_) + "," + shortest_repr(beta_);
    }
    return "?";
  }

  friend bool operator==(const PolynomialFamily&, const PolynomialFamily&) = default;

 private:
  explicit PolynomialFamily(FamilyKind k) : kind_(k) {}
  FamilyKind kind_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
};

/// Parses `name[:p1[,p2]]`: hermite, legendre, chebyshev1, chebyshev2,
/// laguerre[:alpha], jacobi:alpha,beta.
inline PolynomialFamily parse_family(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  std::vector<double> params;
  if (colon != std::string_view::npos) {
    std::string rest(spec.substr(colon + 1));
    std::istringstream is(rest);
    std::string item;
    while (std::getline(is, item, ',')) {
      try {
        std::size_t used = 0;
        params.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ParameterError("family parameter is not a number: '" + item + "'");
      }
    }
  }
  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      throw ParameterError("family '" + name + "' takes " + std::to_string(lo) + ".." + std::to_string(hi) +
                           " parameters");
  };
  if (name == "hermite") return expect(0, 0), PolynomialFamily::hermite();
  if (name == "legendre") return expect(0, 0), PolynomialFamily::legendre();
  if (name == "chebyshev1") return expect(0, 0), PolynomialFamily::chebyshev_first();
  if (name == "chebyshev2") return expect(0, 0), PolynomialFamily::chebyshev_second();
  if (name == "laguerre") {
    expect(0, 1);
    return PolynomialFamily::laguerre(params.empty() ? 0.0 : params[0]);
  }
  if (name == "jacobi") {
    expect(2, 2);
    return PolynomialFamily::jacobi(params[0], params[1]);
  }
  throw ParameterError("unknown family '" + name + "'");
}

/// Families exercised by the property and acceptance suites.
inline std::vector<PolynomialFamily> shipped_families() {
  return {PolynomialFamily::hermite(),          PolynomialFamily::laguerre(0.0),
          PolynomialFamily::legendre(),         PolynomialFamily::chebyshev_first(),
          PolynomialFamily::chebyshev_second(), PolynomialFamily::jacobi(0.5, -0.3)};
}

/// log ||p_q||² under the family measure.
inline double log_norm_squared(const PolynomialFamily& f, std::size_t q) {
  const double n = static_cast<double>(q);
  const double a = f.alpha(), b = f.beta();
  switch (f.kind()) {
    case FamilyKind::Hermite:
      return 0.5 * std::log(std::numbers::pi) + n * std::numbers::ln2 + std::lgamma(n + 1.0);
    case FamilyKind::Laguerre:
      return std::lgamma(a + n + 1.0) - std::lgamma(n + 1.0);
    case FamilyKind::Legendre:
      return std::log(2.0 / (2.0 * n + 1.0));
    case FamilyKind::ChebyshevFirst:
      return q == 0 ? std::log(std::numbers::pi) : std::log(std::numbers::pi / 2.0);
    case FamilyKind::ChebyshevSecond:
      return std::log(std::numbers::pi / 2.0);
    case FamilyKind::Jacobi:
      if (q == 0)
        return (a + b + 1.0) * std::numbers::ln2 + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
               std::lgamma(a + b + 2.0);
      return (a + b + 1.0) * std::numbers::ln2 - std::log(2.0 * n + a + b + 1.0) + std::lgamma(n + a + 1.0) +
             std::lgamma(n + b + 1.0) - std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0);
  }
  return 0.0;
}

/// Total mass ∫dμ.
inline double zeroth_moment(const PolynomialFamily& f) { return std::exp(log_norm_squared(f, 0)); }

struct ClassicalStep {
  double a = 0.0, b = 0.0, c = 0.0;
};

/// Classical coefficients (a_q, b_q, c_q) for q >= 1.
inline ClassicalStep classical_step(const PolynomialFamily& f, std::size_t q) {
  const double n = static_cast<double>(q);
  switch (f.kind()) {
    case FamilyKind::Hermite:
      return {0.0, 2.0, -2.0 * (n - 1.0)};
    case FamilyKind::Laguerre: {
      const double al = f.alpha();
      return {(2.0 * n + al - 1.0) / n, -1.0 / n, q == 1 ? 0.0 : -(n + al - 1.0) / n};
    }
    case FamilyKind::Legendre:
      return {0.0, (2.0 * n - 1.0) / n, -(n - 1.0) / n};
    case FamilyKind::ChebyshevFirst:
      return q == 1 ? ClassicalStep{0.0, 1.0, 0.0} : ClassicalStep{0.0, 2.0, -1.0};
    case FamilyKind::ChebyshevSecond:
      return {0.0, 2.0, q == 1 ? 0.0 : -1.0};
    case FamilyKind::Jacobi: {
      const double al = f.alpha(), be = f.beta();
      if (q == 1) return {(al - be) / 2.0, (al + be + 2.0) / 2.0, 0.0};
      const double s = 2.0 * n + al + be;
      const double denom = 2.0 * n * (n + al + be) * (s - 2.0);
      const double a = (s - 1.0) * (al * al - be * be) / denom;
      const double b = (s - 1.0) * s * (s - 2.0) / denom;
      const double c = -2.0 * (n + al - 1.0) * (n + be - 1.0) * s / denom;
      return {a, b, c};
    }
  }
  return {};
}

struct RecurrenceCoeffs {
  std::vector<double> a, b, c;
  std::vector<double> log_norm_sq;
  std::vector<double> norms;  // ||p_q||; may be +inf for very high degree, see log_norm_sq
  std::vector<double> column_A, column_B, column_C;

  std::size_t max_degree() const { return a.empty() ? 0 : a.size() - 1; }
  /// N_q / N_r = ||p_r|| / ||p_q||
  double norm_ratio(std::size_t q, std::size_t r) const { return std::exp(0.5 * (log_norm_sq[r] - log_norm_sq[q])); }
};

inline RecurrenceCoeffs recurrence_coeffs(const PolynomialFamily& f, std::size_t max_degree) {
  if (max_degree < 1) throw ParameterError("recurrence_coeffs: max_degree must be >= 1");
  const std::size_t n = max_degree + 1;
  RecurrenceCoeffs rc;
  rc.a.assign(n, 0.0);
  rc.b.assign(n, 0.0);
  rc.c.assign(n, 0.0);
  rc.column_A.assign(n, 0.0);
  rc.column_B.assign(n, 0.0);
  rc.column_C.assign(n, 0.0);
  rc.log_norm_sq.resize(n);
  rc.norms.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    rc.log_norm_sq[q] = log_norm_squared(f, q);
    rc.norms[q] = std::exp(0.5 * rc.log_norm_sq[q]);
  }
  for (std::size_t q = 1; q < n; ++q) {
    const auto s = classical_step(f, q);
    rc.a[q] = s.a;
    rc.b[q] = s.b;
    rc.c[q] = s.c;
    const double r1 = rc.norm_ratio(q, q - 1);
    rc.column_A[q] = r1 * s.a;
    rc.column_B[q] = r1 * s.b;
    rc.column_C[q] = q >= 2 ? rc.norm_ratio(q, q - 2) * s.c : 0.0;
  }
  return rc;
}

/// ω(x), the density of μ.
inline double weight_function(const PolynomialFamily& f, double x) {
  if (!f.support().contains(x)) throw DomainError("weight_function: x outside the support of " + f.tag());
  switch (f.kind()) {
    case FamilyKind::Hermite: return std::exp(-x * x);
    case FamilyKind::Laguerre: return std::pow(x, f.alpha()) * std::exp(-x);
    case FamilyKind::Legendre: return 1.0;
    case FamilyKind::ChebyshevFirst: return 1.0 / std::sqrt(1.0 - x * x);
    case FamilyKind::ChebyshevSecond: return std::sqrt(1.0 - x * x);
    case FamilyKind::Jacobi: return std::pow(1.0 - x, f.alpha()) * std::pow(1.0 + x, f.beta());
  }
  return 0.0;
}

/// log ω(x); avoids underflow far out on the infinite supports.
inline double log_weight_function(const PolynomialFamily& f, double x) {
  if (!f.support().contains(x)) throw DomainError("log_weight_function: x outside the support of " + f.tag());
  switch (f.kind()) {
    case FamilyKind::Hermite: return -x * x;
    case FamilyKind::Laguerre: return f.alpha() * std::log(x) - x;
    case FamilyKind::Legendre: return 0.0;
    case FamilyKind::ChebyshevFirst: return -0.5 * std::log1p(-x * x);
    case FamilyKind::ChebyshevSecond: return 0.5 * std::log1p(-x * x);
    case FamilyKind::Jacobi: return f.alpha() * std::log1p(-x) + f.beta() * std::log1p(x);
  }
  return 0.0;
}

/// p_q(x) in classical normalization, by forward recurrence.
inline double eval_poly(const PolynomialFamily& f, std::size_t q, double x) {
  double prev = 0.0, cur = 1.0;
  for (std::size_t k = 1; k <= q; ++k) {
    const auto s = classical_step(f, k);
    const double next = (s.a + s.b * x) * cur + s.c * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Normalized basis functions N_q p_q(x) sqrt(ω(x)) for q = 0..count-1.
///
/// The recurrence is run with rescaling so that large polynomial values
/// times tiny weights do not overflow/underflow separately.
inline std::vector<double> basis_functions(const PolynomialFamily& f, const RecurrenceCoeffs& rc, std::size_t count,
                                           double x) {
  if (count > rc.max_degree() + 1) throw ParameterError("basis_functions: coefficients do not reach requested degree");
  std::vector<double> out(count, 0.0);
  if (count == 0) return out;
  double log_scale = -0.5 * rc.log_norm_sq[0] + 0.5 * log_weight_function(f, x);
  auto emit = [&](std::size_t q, double v) {
    if (v != 0.0) out[q] = std::copysign(std::exp(std::log(std::abs(v)) + log_scale), v);
  };
  double prev = 0.0, cur = 1.0;
  emit(0, cur);
  for (std::size_t q = 1; q < count; ++q) {
    const double next = (rc.column_A[q] + rc.column_B[q] * x) * cur + (q >= 2 ? rc.column_C[q] * prev : 0.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      cur *= 1e-150;
      prev *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
    emit(q, cur);
  }
  return out;
}

/// Per-column scalings of one segment for the C-free scaled recurrence
///     ascending:  T'_q = (A'_q + B'_q x) T'_{q-1} + T'_{q-2}
///     descending: T'_q = (A'_q + B'_q x) T'_{q+1} + T'_{q+2}
/// with T'_q = γ_q T_q and γ = 1 on the two seed columns.
/// Arrays are indexed by v = q - wF.
struct SegmentScaling {
  std::size_t w = 0;
  std::size_t first_column = 0;
  std::vector<double> gamma;
  std::vector<double> a_prime;  // zero on the seed columns
  std::vector<double> b_prime;
};

/// C_q couples T_q to T_{q-2}.  Ascending γ_q = γ_{q-2} / C_q,
/// (A'_q, B'_q) = (γ_q/γ_{q-1}) (A_q, B_q); descending γ_q = C_{q+2} γ_{q+2},
/// (A'_q, B'_q) = -(γ_{q+2}/γ_{q+1}) (A_{q+2}, B_{q+2}).
inline SegmentScaling gamma_scalings(const RecurrenceCoeffs& rc, const SegmentSpec& seg, std::size_t w) {
  if (w >= seg.segments()) throw ParameterError("gamma_scalings: segment index out of range");
  if (rc.max_degree() + 1 < seg.N) throw ParameterError("gamma_scalings: coefficients do not cover N columns");
  const std::size_t F = seg.F;
  const std::size_t base = seg.first_column(w);
  const std::size_t lo = F / 2 - 1;  // v of q̃-1
  const std::size_t hi = F / 2;      // v of q̃
  SegmentScaling s;
  s.w = w;
  s.first_column = base;
  s.gamma.assign(F, 0.0);
  s.a_prime.assign(F, 0.0);
  s.b_prime.assign(F, 0.0);
  s.gamma[lo] = 1.0;
  s.gamma[hi] = 1.0;
  for (std::size_t v = hi + 1; v < F; ++v) {
    const std::size_t q = base + v;
    const double cq = rc.column_C[q];
    if (cq == 0.0) throw SingularScalingError("gamma_scalings: C_" + std::to_string(q) + " = 0 in ascending branch");
    s.gamma[v] = s.gamma[v - 2] / cq;
    const double ratio = s.gamma[v] / s.gamma[v - 1];
    s.a_prime[v] = ratio * rc.column_A[q];
    s.b_prime[v] = ratio * rc.column_B[q];
  }
  for (std::size_t v = lo; v-- > 0;) {
    const std::size_t q = base + v;
    const double c2 = rc.column_C[q + 2];
    if (c2 == 0.0) throw SingularScalingError("gamma_scalings: C_" + std::to_string(q + 2) + " = 0 in descending branch");
    s.gamma[v] = c2 * s.gamma[v + 2];
    const double ratio = -s.gamma[v + 2] / s.gamma[v + 1];
    s.a_prime[v] = ratio * rc.column_A[q + 2];
    s.b_prime[v] = ratio * rc.column_B[q + 2];
  }
  return s;
}

inline SegmentScaling gamma_scalings(const PolynomialFamily& f, const SegmentSpec& seg, std::size_t w) {
  return gamma_scalings(recurrence_coeffs(f, seg.N), seg, w);
}

}  // namespace dvrforge
