#pragma once

// High-precision reference values written independently of the library:
// explicit sums for the classical polynomials, closed-form norms and
// moments, nodes bracketed by sign changes at 100 digits.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dvrforge/polyfam.hpp"

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_100;
using dvrforge::FamilyKind;
using dvrforge::PolynomialFamily;

inline hp pi() { return boost::math::constants::pi<hp>(); }
inline hp gamma(const hp& x) { return boost::math::tgamma(x); }
inline hp fact(int n) { return gamma(hp(n + 1)); }

/// generalized binomial Γ(a+1)/(Γ(b+1)Γ(a-b+1))
inline hp gbinom(const hp& a, const hp& b) { return gamma(a + 1) / (gamma(b + 1) * gamma(a - b + 1)); }

/// Monomial coefficients c_i of the classical p_n (same normalization as the
/// library: H_n physicists', L_n^α, P_n, T_n, U_n, P_n^(α,β)).
inline std::vector<hp> coefficients(const PolynomialFamily& f, int n) {
  std::vector<hp> c(n + 1, hp(0));
  const hp a = f.alpha(), b = f.beta();
  switch (f.kind()) {
    case FamilyKind::Hermite:
      for (int m = 0; 2 * m <= n; ++m)
        c[n - 2 * m] = fact(n) * ((m % 2) ? -1 : 1) * pow(hp(2), n - 2 * m) / (fact(m) * fact(n - 2 * m));
      break;
    case FamilyKind::Laguerre:
      for (int k = 0; k <= n; ++k) c[k] = ((k % 2) ? -1 : 1) * gbinom(n + a, hp(n - k)) / fact(k);
      break;
    case FamilyKind::Legendre:
      for (int k = 0; 2 * k <= n; ++k)
        c[n - 2 * k] = ((k % 2) ? -1 : 1) * boost::math::binomial_coefficient<hp>(n, k) *
                       boost::math::binomial_coefficient<hp>(2 * n - 2 * k, n) / pow(hp(2), n);
      break;
    case FamilyKind::ChebyshevFirst:
      if (n == 0) {
        c[0] = 1;
        break;
      }
      for (int k = 0; 2 * k <= n; ++k)
        c[n - 2 * k] = hp(n) / 2 * ((k % 2) ? -1 : 1) * fact(n - k - 1) / (fact(k) * fact(n - 2 * k)) *
                       pow(hp(2), n - 2 * k);
      break;
    case FamilyKind::ChebyshevSecond:
      for (int k = 0; 2 * k <= n; ++k)
        c[n - 2 * k] = ((k % 2) ? -1 : 1) * boost::math::binomial_coefficient<hp>(n - k, k) * pow(hp(2), n - 2 * k);
      break;
    case FamilyKind::Jacobi: {
      // Σ_s C(n+α, n-s) C(n+β, s) ((x-1)/2)^s ((x+1)/2)^{n-s}
      for (int s = 0; s <= n; ++s) {
        const hp w = gbinom(n + a, hp(n - s)) * gbinom(n + b, hp(s)) / pow(hp(2), n);
        // (x-1)^s (x+1)^{n-s}
        std::vector<hp> poly{hp(1)};
        auto mul = [&](int sign) {
          std::vector<hp> next(poly.size() + 1, hp(0));
          for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] += poly[i];
            next[i] += sign * poly[i];
          }
          poly = std::move(next);
        };
        for (int i = 0; i < s; ++i) mul(-1);
        for (int i = 0; i < n - s; ++i) mul(+1);
        for (int i = 0; i <= n; ++i) c[i] += w * poly[i];
      }
      break;
    }
  }
  return c;
}

inline hp horner(const std::vector<hp>& c, const hp& x) {
  hp acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

/// Closed-form trigonometric evaluation for Chebyshev; explicit sums otherwise.
inline hp eval(const PolynomialFamily& f, int n, const hp& x, const std::vector<hp>& coefs) {
  if (f.kind() == FamilyKind::ChebyshevFirst && abs(x) < 1) return cos(n * acos(x));
  if (f.kind() == FamilyKind::ChebyshevSecond && abs(x) < 1) {
    const hp t = acos(x);
    return sin((n + 1) * t) / sin(t);
  }
  return horner(coefs, x);
}

inline hp eval(const PolynomialFamily& f, int n, const hp& x) { return eval(f, n, x, coefficients(f, n)); }

/// ||p_n||²
inline hp norm_sq(const PolynomialFamily& f, int n) {
  const hp a = f.alpha(), b = f.beta();
  switch (f.kind()) {
    case FamilyKind::Hermite: return sqrt(pi()) * pow(hp(2), n) * fact(n);
    case FamilyKind::Laguerre: return gamma(n + a + 1) / fact(n);
    case FamilyKind::Legendre: return hp(2) / (2 * n + 1);
    case FamilyKind::ChebyshevFirst: return n == 0 ? pi() : pi() / 2;
    case FamilyKind::ChebyshevSecond: return pi() / 2;
    case FamilyKind::Jacobi:
      return pow(hp(2), a + b + 1) / (2 * n + a + b + 1) * gamma(n + a + 1) * gamma(n + b + 1) /
             (gamma(n + a + b + 1) * fact(n));
  }
  return 0;
}

inline hp weight(const PolynomialFamily& f, const hp& x) {
  switch (f.kind()) {
    case FamilyKind::Hermite: return exp(-x * x);
    case FamilyKind::Laguerre: return pow(x, hp(f.alpha())) * exp(-x);
    case FamilyKind::Legendre: return 1;
    case FamilyKind::ChebyshevFirst: return 1 / sqrt(1 - x * x);
    case FamilyKind::ChebyshevSecond: return sqrt(1 - x * x);
    case FamilyKind::Jacobi: return pow(1 - x, hp(f.alpha())) * pow(1 + x, hp(f.beta()));
  }
  return 0;
}

/// ∫ x^k dμ
inline hp moment(const PolynomialFamily& f, int k) {
  const hp a = f.alpha(), b = f.beta();
  const bool odd = k % 2 == 1;
  switch (f.kind()) {
    case FamilyKind::Hermite: return odd ? hp(0) : gamma(hp(k + 1) / 2);
    case FamilyKind::Laguerre: return gamma(k + a + 1);
    case FamilyKind::Legendre: return odd ? hp(0) : hp(2) / (k + 1);
    case FamilyKind::ChebyshevFirst: return odd ? hp(0) : sqrt(pi()) * gamma(hp(k + 1) / 2) / gamma(hp(k) / 2 + 1);
    case FamilyKind::ChebyshevSecond:
      return odd ? hp(0) : sqrt(pi()) * gamma(hp(k + 1) / 2) / (2 * gamma(hp(k) / 2 + 2));
    case FamilyKind::Jacobi: {
      // x = 2t - 1, dμ = 2^{α+β+1} (1-t)^α t^β dt
      hp s = 0;
      for (int j = 0; j <= k; ++j)
        s += boost::math::binomial_coefficient<hp>(k, j) * pow(hp(2), j) * (((k - j) % 2) ? -1 : 1) *
             boost::math::beta(a + 1, b + j + 1);
      return pow(hp(2), a + b + 1) * s;
    }
  }
  return 0;
}

/// A scale bounding ∫|x|^k dμ, for relative comparisons of possibly-zero moments.
inline hp moment_scale(const PolynomialFamily& f, int k) {
  switch (f.kind()) {
    case FamilyKind::Hermite: return gamma(hp(k + 1) / 2);
    case FamilyKind::Laguerre: return moment(f, k);
    default: return moment(f, k % 2 ? k - 1 : k);  // |x| <= 1
  }
}

struct Rule {
  std::vector<hp> nodes, weights;
};

/// Refines approximate nodes: each must bracket a sign change of p_N within
/// ±delta; then bisection to full precision.  Weights from the Christoffel
/// sum w_k = 1 / Σ_j p_j(x_k)² / h_j.
inline Rule refine_rule(const PolynomialFamily& f, const std::vector<double>& approx, double rel_delta = 1e-10) {
  const int N = static_cast<int>(approx.size());
  const auto cN = coefficients(f, N);
  Rule r;
  for (double x0 : approx) {
    const hp delta = rel_delta * std::max(1.0, std::abs(x0));
    hp lo = hp(x0) - delta, hi = hp(x0) + delta;
    hp flo = horner(cN, lo), fhi = horner(cN, hi);
    if ((flo > 0) == (fhi > 0)) throw std::runtime_error("oracle: no sign change near node");
    for (int it = 0; it < 200; ++it) {
      const hp mid = (lo + hi) / 2;
      const hp fm = horner(cN, mid);
      if ((fm > 0) == (flo > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    r.nodes.push_back((lo + hi) / 2);
  }
  std::vector<std::vector<hp>> cs;
  std::vector<hp> hs;
  for (int j = 0; j < N; ++j) {
    cs.push_back(coefficients(f, j));
    hs.push_back(norm_sq(f, j));
  }
  for (const hp& x : r.nodes) {
    hp s = 0;
    for (int j = 0; j < N; ++j) {
      const hp p = horner(cs[j], x);
      s += p * p / hs[j];
    }
    r.weights.push_back(1 / s);
  }
  return r;
}

inline double to_d(const hp& x) { return static_cast<double>(x); }

}  // namespace oracle
