#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dvrforge/dvr_core.hpp"
#include "dvrforge/polyfam.hpp"
#include "dvrforge/quadrature.hpp"
#include "oracles.hpp"

using namespace dvrforge;

namespace {

std::vector<PolynomialFamily> test_families() {
  auto fs = shipped_families();
  fs.push_back(PolynomialFamily::laguerre(1.5));
  fs.push_back(PolynomialFamily::jacobi(0.5, 0.5));
  fs.push_back(PolynomialFamily::jacobi(-0.5, 0.25));
  return fs;
}

// sample points inside the oscillatory region of p_q
std::vector<double> sample_grid(const PolynomialFamily& f, std::size_t q) {
  double lo = -0.999, hi = 0.999;
  if (f.kind() == FamilyKind::Hermite) hi = std::sqrt(2.0 * q + 1.0), lo = -hi;
  if (f.kind() == FamilyKind::Laguerre) lo = 0.0, hi = 4.0 * q + 2.0;
  std::vector<double> xs;
  for (int i = 0; i <= 40; ++i) xs.push_back(lo + (hi - lo) * i / 40.0);
  return xs;
}

}  // namespace

TEST(FamilyGrammar, ParsesAndRoundTrips) {
  for (const auto& f : test_families()) EXPECT_EQ(parse_family(f.tag()), f) << f.tag();
  EXPECT_EQ(parse_family("laguerre").tag(), "laguerre:0");
  EXPECT_EQ(parse_family("jacobi:0.5,-0.3").tag(), "jacobi:0.5,-0.3");
  EXPECT_EQ(parse_family("chebyshev2").kind(), FamilyKind::ChebyshevSecond);
}

TEST(FamilyGrammar, RejectsBadInput) {
  EXPECT_THROW(parse_family("jacobi:2,-2"), ParameterError);
  EXPECT_THROW(parse_family("laguerre:-1"), ParameterError);
  EXPECT_THROW(parse_family("hermit"), ParameterError);
  EXPECT_THROW(parse_family("jacobi:0.5"), ParameterError);
  EXPECT_THROW(parse_family("legendre:1"), ParameterError);
  EXPECT_THROW(parse_family("jacobi:a,b"), ParameterError);
}

TEST(Recurrence, ChebyshevSecondCoefficientsAndNorm) {
  const auto rc = recurrence_coeffs(PolynomialFamily::chebyshev_second(), 4);
  for (std::size_t q = 2; q <= 4; ++q) {
    EXPECT_EQ(rc.a[q], 0.0);
    EXPECT_EQ(rc.b[q], 2.0);
    EXPECT_EQ(rc.c[q], -1.0);
  }
  for (std::size_t q = 0; q <= 4; ++q) EXPECT_NEAR(rc.norms[q], std::sqrt(std::numbers::pi / 2), 1e-15);
}

TEST(Recurrence, LegendreColumnForm) {
  const auto rc = recurrence_coeffs(PolynomialFamily::legendre(), 4);
  for (std::size_t q = 2; q <= 4; ++q) {
    const double qd = static_cast<double>(q);
    EXPECT_NEAR(rc.column_B[q], std::sqrt(4 * qd * qd - 1) / qd, 1e-14);
    EXPECT_NEAR(rc.column_C[q], -((qd - 1) / qd) * std::sqrt((2 * qd + 1) / (2 * qd - 3)), 1e-14);
    EXPECT_EQ(rc.column_A[q], 0.0);
  }
}

TEST(Recurrence, LaguerreColumnForm) {
  const auto rc = recurrence_coeffs(PolynomialFamily::laguerre(0.0), 3);
  for (std::size_t q = 0; q <= 3; ++q) EXPECT_NEAR(rc.norms[q], 1.0, 1e-15);
  for (std::size_t q = 2; q <= 3; ++q) {
    const double qd = static_cast<double>(q);
    EXPECT_NEAR(rc.column_A[q], (2 * qd - 1) / qd, 1e-15);
    EXPECT_NEAR(rc.column_B[q], -1.0 / qd, 1e-15);
    EXPECT_NEAR(rc.column_C[q], -(qd - 1) / qd, 1e-15);
  }
}

TEST(Recurrence, ParityIffFreeTermVanishes) {
  for (const auto& f : test_families()) {
    const auto rc = recurrence_coeffs(f, 40);
    bool all_zero = true;
    for (double a : rc.column_A) all_zero = all_zero && a == 0.0;
    EXPECT_EQ(all_zero, f.is_parity_conserving()) << f.tag();
  }
}

TEST(Recurrence, RejectsZeroDegree) { EXPECT_THROW(recurrence_coeffs(PolynomialFamily::hermite(), 0), ParameterError); }

TEST(Weight, Values) {
  EXPECT_EQ(weight_function(PolynomialFamily::hermite(), 0.0), 1.0);
  EXPECT_EQ(weight_function(PolynomialFamily::chebyshev_second(), 0.0), 1.0);
  EXPECT_NEAR(weight_function(PolynomialFamily::laguerre(0.0), 2.0), std::exp(-2.0), 1e-16);
  EXPECT_NEAR(weight_function(PolynomialFamily::laguerre(0.0), 2.0), 0.135335, 1e-6);
}

TEST(Weight, OutsideSupportThrows) {
  EXPECT_THROW(weight_function(PolynomialFamily::legendre(), 1.5), DomainError);
  EXPECT_THROW(weight_function(PolynomialFamily::laguerre(0.0), -0.1), DomainError);
  EXPECT_THROW(weight_function(PolynomialFamily::chebyshev_first(), -2.0), DomainError);
}

TEST(EvalPoly, SpotValues) {
  EXPECT_NEAR(eval_poly(PolynomialFamily::chebyshev_second(), 2, 0.5), 0.0, 1e-15);
  EXPECT_EQ(eval_poly(PolynomialFamily::legendre(), 2, 1.0), 1.0);
  EXPECT_EQ(eval_poly(PolynomialFamily::hermite(), 3, 1.0), -4.0);
}

TEST(EvalPoly, MatchesExplicitForms) {
  for (const auto& f : test_families()) {
    for (std::size_t q : {0, 1, 2, 5, 13, 32, 47, 64}) {
      const auto xs = sample_grid(f, q);
      std::vector<oracle::hp> ref;
      double scale = 0.0;
      const auto coefs = oracle::coefficients(f, static_cast<int>(q));
      for (double x : xs) {
        ref.push_back(oracle::eval(f, static_cast<int>(q), oracle::hp(x), coefs));
        scale = std::max(scale, std::abs(oracle::to_d(ref.back())));
      }
      for (std::size_t i = 0; i < xs.size(); ++i)
        EXPECT_NEAR(eval_poly(f, q, xs[i]), oracle::to_d(ref[i]), 1e-10 * scale) << f.tag() << " q=" << q << " x=" << xs[i];
    }
  }
}

TEST(Norms, MatchClosedForms) {
  for (const auto& f : test_families()) {
    const auto rc = recurrence_coeffs(f, 64);
    for (int q = 0; q <= 64; ++q)
      EXPECT_NEAR(rc.log_norm_sq[q], oracle::to_d(log(oracle::norm_sq(f, q))), 1e-11 * std::max(1.0, std::abs(rc.log_norm_sq[q])))
          << f.tag() << " q=" << q;
  }
}

TEST(Orthogonality, FourNPointRule) {
  for (const auto& f : test_families()) {
    for (std::size_t N : {4, 12, 32}) {
      const auto q = nodes_weights(f, 4 * N);
      const auto rc = recurrence_coeffs(f, N);
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          double s = 0.0;
          for (std::size_t k = 0; k < q.nodes.size(); ++k)
            s += q.weights[k] * eval_poly(f, i, q.nodes[k]) * eval_poly(f, j, q.nodes[k]);
          const double scale = rc.norms[i] * rc.norms[j];
          const double expect = i == j ? rc.norms[i] * rc.norms[i] : 0.0;
          EXPECT_NEAR(s / scale, expect / scale, 1e-9) << f.tag() << " N=" << N << " i=" << i << " j=" << j;
        }
    }
  }
}

TEST(Gamma, ChebyshevSecondUnitMagnitude) {
  const auto seg = SegmentSpec::make(64, 16);
  for (std::size_t w = 0; w < seg.segments(); ++w) {
    const auto s = gamma_scalings(PolynomialFamily::chebyshev_second(), seg, w);
    for (double g : s.gamma) EXPECT_EQ(std::abs(g), 1.0);
  }
}

TEST(Gamma, MidpointColumnsAreOne) {
  for (const auto& f : shipped_families()) {
    const auto seg = SegmentSpec::make(32, 8);
    for (std::size_t w = 0; w < seg.segments(); ++w) {
      const auto s = gamma_scalings(f, seg, w);
      EXPECT_EQ(s.gamma[3], 1.0);
      EXPECT_EQ(s.gamma[4], 1.0);
      EXPECT_EQ(s.first_column, 8 * w);
    }
  }
}

// scaled recurrence satisfied by γ_q T_pq on the actual DVR columns
TEST(Gamma, HermiteScaledRecurrenceResidual) {
  const auto f = PolynomialFamily::hermite();
  const std::size_t N = 8;
  const auto seg = SegmentSpec::make(N, 8);
  const auto t = build_dvr(f, N);
  const auto s = gamma_scalings(f, seg, 0);
  double worst = 0.0;
  for (std::size_t p = 0; p < N; ++p) {
    const double x = t.quadrature.nodes[p];
    auto tp = [&](std::size_t v) { return s.gamma[v] * t(p, v); };
    for (std::size_t v = 5; v < 8; ++v)
      worst = std::max(worst, std::abs(tp(v) - ((s.a_prime[v] + s.b_prime[v] * x) * tp(v - 1) + tp(v - 2))));
    for (std::size_t v = 0; v < 3; ++v)
      worst = std::max(worst, std::abs(tp(v) - ((s.a_prime[v] + s.b_prime[v] * x) * tp(v + 1) + tp(v + 2))));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Gamma, ScaledRecurrenceAllFamilies) {
  for (const auto& f : test_families()) {
    const std::size_t N = 32;
    const auto seg = SegmentSpec::make(N, 16);
    const auto t = build_dvr(f, N);
    for (std::size_t w = 0; w < seg.segments(); ++w) {
      const auto s = gamma_scalings(f, seg, w);
      double worst = 0.0, scale = 0.0;
      for (std::size_t p = 0; p < N; ++p) {
        const double x = t.quadrature.nodes[p];
        auto tp = [&](std::size_t v) { return s.gamma[v] * t(p, 16 * w + v); };
        for (std::size_t v = 0; v < 16; ++v) scale = std::max(scale, std::abs(tp(v)));
        for (std::size_t v = 9; v < 16; ++v)
          worst = std::max(worst, std::abs(tp(v) - ((s.a_prime[v] + s.b_prime[v] * x) * tp(v - 1) + tp(v - 2))));
        for (std::size_t v = 0; v < 7; ++v)
          worst = std::max(worst, std::abs(tp(v) - ((s.a_prime[v] + s.b_prime[v] * x) * tp(v + 1) + tp(v + 2))));
      }
      EXPECT_LT(worst, 1e-10 * scale) << f.tag() << " w=" << w;
    }
  }
}

TEST(Gamma, RejectsOutOfRangeSegment) {
  const auto seg = SegmentSpec::make(16, 4);
  EXPECT_THROW(gamma_scalings(PolynomialFamily::legendre(), seg, 4), ParameterError);
}

TEST(Gamma, ZeroCoefficientIsSingular) {
  auto rc = recurrence_coeffs(PolynomialFamily::legendre(), 16);
  rc.column_C[6] = 0.0;
  EXPECT_THROW(gamma_scalings(rc, SegmentSpec::make(16, 8), 0), SingularScalingError);
}
