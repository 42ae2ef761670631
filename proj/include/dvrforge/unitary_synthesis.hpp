#pragma once

// Dense verification of the DVR unitary constructions: reflections about
// w_k = (|0>|k> - |1>|u_k>)/√2, the binary angle tree that prepares u_k, and
// the arcsin oracle with its Taylor-series evaluation.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dvrforge/cost_models.hpp"
#include "dvrforge/dvr_core.hpp"
#include "dvrforge/error.hpp"
#include "dvrforge/fixed_point.hpp"
#include "dvrforge/linalg.hpp"

namespace dvrforge {

inline std::size_t exact_log2(std::size_t N) {
  if (N < 1 || !std::has_single_bit(N)) throw ParameterError("size must be a power of two, got " + std::to_string(N));
  return static_cast<std::size_t>(std::countr_zero(N));
}

// ---------------------------------------------------------------------------
// Angle trees

struct AngleTree {
  std::size_t k = 0;
  std::size_t n = 0;
  bool parity = false;          // upper half only, mirrored by the CX fan
  std::size_t first_qubit = 0;  // qubit acted on by levels[0]
  std::vector<std::vector<double>> levels;  // signed angles, |φ| <= π/2
  bool leader_nonnegative = true;           // sign of the first nonzero amplitude

  nlohmann::json to_json() const {
    nlohmann::json lv = nlohmann::json::array();
    for (std::size_t i = 0; i < levels.size(); ++i)
      lv.push_back({{"qubit", first_qubit + i}, {"angles", levels[i]}});
    return {{"k", k}, {"n", n}, {"parity", parity}, {"leader_nonnegative", leader_nonnegative}, {"levels", lv}};
  }
};

namespace detail {

inline double first_nonzero(std::span<const double> v) {
  for (double x : v)
    if (x != 0.0) return x;
  return 0.0;
}

inline double sum_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

/// Angles splitting each block of `amps` in half, level by level, starting
/// with a single block.
inline std::vector<std::vector<double>> split_angles(std::span<const double> amps, std::size_t depth) {
  std::vector<std::vector<double>> levels;
  for (std::size_t t = 0; t < depth; ++t) {
    const std::size_t blocks = std::size_t{1} << t;
    const std::size_t len = amps.size() / blocks;
    std::vector<double> lv(blocks, 0.0);
    for (std::size_t l = 0; l < blocks; ++l) {
      const auto left = amps.subspan(l * len, len / 2);
      const auto right = amps.subspan(l * len + len / 2, len / 2);
      const double total = sum_sq(left) + sum_sq(right);
      if (total == 0.0) continue;  // unreachable branch
      const double phi = std::acos(std::clamp(std::sqrt(sum_sq(left) / total), 0.0, 1.0));
      const double lead_l = first_nonzero(left), lead_r = first_nonzero(right);
      const bool same = lead_l == 0.0 || lead_r == 0.0 || ((lead_l > 0) == (lead_r > 0));
      lv[l] = same ? phi : -phi;
    }
    levels.push_back(std::move(lv));
  }
  return levels;
}

}  // namespace detail

/// Angle tree for column k.  Parity mode consumes only rows p < N/2.
inline AngleTree angle_tree(const Matrix& T, std::size_t k, bool parity) {
  const std::size_t N = T.rows();
  if (T.cols() != N) throw ShapeError("angle_tree: matrix must be square");
  if (k >= N) throw ParameterError("angle_tree: column out of range");
  const std::size_t n = exact_log2(N);
  const auto col = T.column(k);
  const double norm = detail::sum_sq(col);
  if (std::abs(norm - 1.0) > 1e-8) throw SynthesisError("angle_tree: column " + std::to_string(k) + " is not unit norm");
  AngleTree a;
  a.k = k;
  a.n = n;
  a.parity = parity && n >= 1;
  a.leader_nonnegative = detail::first_nonzero(col) >= 0.0;
  if (a.parity) {
    a.first_qubit = 1;
    a.levels = detail::split_angles(std::span<const double>(col).subspan(0, N / 2), n - 1);
  } else {
    a.first_qubit = 0;
    a.levels = detail::split_angles(col, n);
  }
  return a;
}

inline AngleTree angle_tree(const DvrMatrix& T, std::size_t k) {
  return angle_tree(T.entries, k, T.family.is_parity_conserving());
}

/// Amplitudes encoded by the tree (leader made nonnegative).
inline std::vector<double> tree_amplitudes(const AngleTree& a) {
  const std::size_t N = std::size_t{1} << a.n;
  const std::size_t len = a.parity ? N / 2 : N;
  std::vector<double> amp(len, 0.0);
  amp[0] = a.parity ? std::sqrt(0.5) : 1.0;
  std::size_t block = len;
  for (const auto& lv : a.levels) {
    const std::size_t half = block / 2;
    for (std::size_t l = 0; l < lv.size(); ++l) {
      const double base = amp[l * block];
      const double phi = lv[l];
      amp[l * block] = base * std::cos(std::abs(phi));
      amp[l * block + half] = base * std::sin(std::abs(phi)) * (phi < 0 ? -1.0 : 1.0);
    }
    block = half;
  }
  if (!a.parity) return amp;
  std::vector<double> full(N);
  const double sign = a.k % 2 == 0 ? 1.0 : -1.0;
  for (std::size_t p = 0; p < N / 2; ++p) {
    full[p] = amp[p];
    full[N - 1 - p] = sign * amp[p];
  }
  return full;
}

// ---------------------------------------------------------------------------
// State-vector simulation of the preparation network
//
// Register layout: ancilla a is the most significant bit, then the n index
// qubits with qubit 0 the most significant bit of p.  Index = a·N + p.

namespace detail {

struct Sim {
  std::size_t n;
  std::vector<double> psi;

  std::size_t N() const { return std::size_t{1} << n; }
  std::size_t abit() const { return N(); }
  std::size_t qbit(std::size_t j) const { return std::size_t{1} << (n - 1 - j); }

  /// applies a real 2×2 gate g on `target` to basis states satisfying (i & mask) == value
  template <class Gate>
  void apply(std::size_t target_bit, std::size_t mask, std::size_t value, Gate g) {
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (i & target_bit) continue;
      if ((i & mask) != value) continue;
      const std::size_t j = i | target_bit;
      const double a0 = psi[i], a1 = psi[j];
      g(a0, a1, psi[i], psi[j]);
    }
  }
};

}  // namespace detail

struct StatePrepResult {
  std::vector<double> state;  // 2N amplitudes
  CostLedger ledger;
};

/// Runs the network.  `m` sets the angle precision charged per rotation.
inline StatePrepResult simulate_state_prep(const AngleTree& tree, int m = 16) {
  const std::size_t n = tree.n;
  detail::Sim s{n, std::vector<double>(std::size_t{2} << n, 0.0)};
  s.psi[0] = 1.0;
  StatePrepResult out;
  CostLedger& L = out.ledger;
  const FxConfig cost = FxConfig::standard(std::max(m, 3));
  const double r = std::sqrt(0.5);
  auto X = [](double a0, double a1, double& o0, double& o1) { o0 = a1; o1 = a0; };
  auto H = [r](double a0, double a1, double& o0, double& o1) {
    o0 = r * (a0 + a1);
    o1 = r * (a0 - a1);
  };
  auto Zlow = [](double a0, double a1, double& o0, double& o1) { o0 = a0; o1 = -a1; };

  // step 1: sign gate, H, index load controlled on a = 0
  if (tree.leader_nonnegative) s.apply(s.abit(), 0, 0, X);
  s.apply(s.abit(), 0, 0, H);
  for (std::size_t j = 0; j < n; ++j)
    if ((tree.k >> (n - 1 - j)) & 1u) s.apply(s.qbit(j), s.abit(), 0, X);

  // step 2: split the two halves (parity)
  if (tree.parity) {
    s.apply(s.qbit(0), s.abit(), s.abit(), H);
    L.charge("controlled_h", 1);
  }

  // step 4: one uniformly controlled rotation per level, sign via controlled Z
  for (std::size_t li = 0; li < tree.levels.size(); ++li) {
    const std::size_t target = tree.first_qubit + li;
    const auto& lv = tree.levels[li];
    L.charge("qrom_angles", lv.size());
    charge_add(L, cost.m, cost.m, true, cost);  // phase-gradient rotation
    for (std::size_t l = 0; l < lv.size(); ++l) {
      std::size_t mask = s.abit(), value = s.abit();
      for (std::size_t b = 0; b < li; ++b) {
        const std::size_t qb = s.qbit(tree.first_qubit + b);
        mask |= qb;
        if ((l >> (li - 1 - b)) & 1u) value |= qb;
      }
      const double c = std::cos(std::abs(lv[l])), sn = std::sin(std::abs(lv[l]));
      s.apply(s.qbit(target), mask, value, [c, sn](double a0, double a1, double& o0, double& o1) {
        o0 = c * a0 - sn * a1;
        o1 = sn * a0 + c * a1;
      });
      if (lv[l] < 0) s.apply(s.qbit(target), mask, value, Zlow);
    }
    fx_uncompute(L, lv.size());
  }
  if (tree.parity) fx_uncompute(L, 1);  // controlled-H

  // steps 3/5: mirror the upper half into the lower one, then parity sign
  if (tree.parity) {
    for (std::size_t j = 1; j < n; ++j) s.apply(s.qbit(j), s.abit() | s.qbit(0), s.abit() | s.qbit(0), X);
    if (tree.k % 2 == 1) s.apply(s.qbit(0), s.abit(), s.abit(), Zlow);
  }
  out.state = std::move(s.psi);
  return out;
}

/// (|0,k> - |1,u_k>)/√2
inline std::vector<double> reflection_vector(const Matrix& T, std::size_t k) {
  const std::size_t N = T.rows();
  std::vector<double> w(2 * N, 0.0);
  const double r = std::sqrt(0.5);
  w[k] = r;
  for (std::size_t p = 0; p < N; ++p) w[N + p] = -r * T(p, k);
  return w;
}

struct StatePrepCheck {
  double min_overlap = 1.0;
  double max_norm_defect = 0.0;
  double max_deviation = 0.0;
  CostLedger ledger;  // of the last column (identical for all columns)
};

/// Every column: overlap of the simulated state with w_k.  Throws
/// SynthesisError when any amplitude deviates by more than 1e-8.
inline StatePrepCheck check_state_prep(const Matrix& T, bool parity, int m = 16) {
  StatePrepCheck c;
  for (std::size_t k = 0; k < T.cols(); ++k) {
    const auto res = simulate_state_prep(angle_tree(T, k, parity), m);
    const auto target = reflection_vector(T, k);
    double ov = 0.0, nrm = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      ov += res.state[i] * target[i];
      nrm += res.state[i] * res.state[i];
      dev = std::max(dev, std::abs(res.state[i] - target[i]));
    }
    c.min_overlap = std::min(c.min_overlap, ov);
    c.max_norm_defect = std::max(c.max_norm_defect, std::abs(std::sqrt(nrm) - 1.0));
    c.max_deviation = std::max(c.max_deviation, dev);
    c.ledger = res.ledger;
  }
  if (c.max_deviation > 1e-8)
    throw SynthesisError("state preparation mismatch: max amplitude deviation " + std::to_string(c.max_deviation));
  return c;
}

// ---------------------------------------------------------------------------
// Reflections

/// Π_k (I - 2 w_k w_kᵀ), applied in the given column order.
inline Matrix reflection_product(const Matrix& T, std::span<const std::size_t> order) {
  const std::size_t N = T.rows();
  Matrix M = Matrix::identity(2 * N);
  for (std::size_t k : order) {
    const auto w = reflection_vector(T, k);
    // M <- M (I - 2 w wᵀ)
    std::vector<double> mw(2 * N, 0.0);
    for (std::size_t i = 0; i < 2 * N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 2 * N; ++j) s += M(i, j) * w[j];
      mw[i] = s;
    }
    for (std::size_t i = 0; i < 2 * N; ++i)
      for (std::size_t j = 0; j < 2 * N; ++j) M(i, j) -= 2.0 * mw[i] * w[j];
  }
  return M;
}

inline Matrix reflection_product(const Matrix& T) {
  std::vector<std::size_t> order(T.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return reflection_product(T, order);
}

/// [[0, top_right], [bottom_left, 0]]
inline Matrix anti_block(const Matrix& top_right, const Matrix& bottom_left) {
  const std::size_t N = top_right.rows();
  Matrix D(2 * N, 2 * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      D(i, N + j) = top_right(i, j);
      D(N + i, j) = bottom_left(i, j);
    }
  return D;
}

struct ReflectionReport {
  Matrix product;
  double residual_adjoint = 0.0;  // vs [[0, Tᵀ], [T, 0]]
  double residual_printed = 0.0;  // vs [[0, T], [Tᵀ, 0]]
  std::string convention;
  double unitarity_defect = 0.0;
  double orthonormality_defect = 0.0;  // max |<w_k|w_j> - δ_kj|
  double permutation_delta = 0.0;      // reversed order vs natural order

  nlohmann::json to_json() const {
    return {{"residual_adjoint_pairing", residual_adjoint},
            {"residual_printed_pairing", residual_printed},
            {"convention", convention},
            {"unitarity_defect", unitarity_defect},
            {"orthonormality_defect", orthonormality_defect},
            {"permutation_delta", permutation_delta}};
  }
};

inline ReflectionReport verify_reflections(const Matrix& T, double tol = 1e-9) {
  const std::size_t N = T.rows();
  ReflectionReport r;
  r.product = reflection_product(T);
  const Matrix Tt = T.transposed();
  r.residual_adjoint = max_abs_diff(r.product, anti_block(Tt, T));
  r.residual_printed = max_abs_diff(r.product, anti_block(T, Tt));
  if (r.residual_adjoint <= tol && r.residual_printed <= tol)
    r.convention = "both (T symmetric)";
  else if (r.residual_adjoint <= tol)
    r.convention = "adjoint pairing: |0><1| T^T + |1><0| T";
  else if (r.residual_printed <= tol)
    r.convention = "printed pairing: |0><1| T + |1><0| T^T";
  else
    r.convention = "neither";
  r.unitarity_defect = orthogonality_defect(r.product);
  std::vector<std::vector<double>> ws;
  for (std::size_t k = 0; k < N; ++k) ws.push_back(reflection_vector(T, k));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < 2 * N; ++i) s += ws[a][i] * ws[b][i];
      r.orthonormality_defect = std::max(r.orthonormality_defect, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  std::vector<std::size_t> rev(N);
  std::iota(rev.rbegin(), rev.rend(), std::size_t{0});
  r.permutation_delta = max_abs_diff(r.product, reflection_product(T, rev));
  return r;
}

// ---------------------------------------------------------------------------
// Arcsin oracle

/// (2/π) arcsin(T_pq) in m-bit fixed point with m-2 fractional bits.
inline std::vector<FixedPointValue> arcsin_oracle_values(const Matrix& T, int m) {
  const FxConfig cfg = FxConfig::standard(m);
  std::vector<FixedPointValue> out;
  out.reserve(T.rows() * T.cols());
  for (double v : T.data()) {
    if (std::abs(v) > 1.0) throw DomainError("arcsin_oracle_values: |entry| > 1");
    out.push_back(fx_encode(2.0 / std::numbers::pi * std::asin(v), cfg));
  }
  return out;
}

/// Amplitude of |0> after the bitwise controlled rotation driven by the
/// register θ = (2/π) arcsin a: start at π/2, then for every bit i rotate by
/// -(π/2)·weight_i (the sign bit carries weight -2^{w-1-frac}).
inline double controlled_rotation_amplitude(const FixedPointValue& theta) {
  double c = 0.0, s = 1.0;  // cos, sin of π/2
  for (int i = 0; i < theta.width; ++i) {
    const bool bit = (static_cast<std::uint64_t>(theta.raw) >> i) & 1u;
    if (!bit) continue;
    double weight = std::ldexp(1.0, i - theta.frac_bits);
    if (i == theta.width - 1) weight = -weight;
    const double ang = -0.5 * std::numbers::pi * weight;
    const double ca = std::cos(ang), sa = std::sin(ang);
    const double nc = ca * c - sa * s, ns = sa * c + ca * s;
    c = nc;
    s = ns;
  }
  return c;
}

/// Maclaurin coefficients of arcsin: (2k)! / (4^k (k!)² (2k+1)).
inline std::vector<double> arcsin_coefficients(std::size_t p_terms) {
  std::vector<double> c;
  double central = 1.0;  // (2k)! / (4^k (k!)²)
  for (std::size_t k = 0; k < p_terms; ++k) {
    if (k > 0) central *= (2.0 * k - 1.0) / (2.0 * k);
    c.push_back(central / (2.0 * k + 1.0));
  }
  return c;
}

inline double arcsin_taylor_double(double x, std::size_t p_terms) {
  const auto c = arcsin_coefficients(p_terms);
  const double x2 = x * x;
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x2 + c[k];
  return acc * x;
}

inline constexpr double kArcsinTaylorXMax = 0.5;

struct ArcsinTaylorResult {
  FixedPointValue value;
  std::vector<std::string> warnings;
};

/// Register schedule: x² once, x^{2k+1} = x^{2k-1}·x², each term scaled by its
/// classical coefficient and accumulated.
inline ArcsinTaylorResult arcsin_taylor(double x, std::size_t p_terms, const FxConfig& cfg, CostLedger& ledger,
                                        double x_max = kArcsinTaylorXMax) {
  if (p_terms < 1) throw ParameterError("arcsin_taylor: need at least one term");
  ArcsinTaylorResult r;
  if (std::abs(x) > x_max)
    r.warnings.push_back("|x| = " + std::to_string(std::abs(x)) + " exceeds x_max = " + std::to_string(x_max) +
                         "; entries above the threshold should be loaded directly");
  const auto coef = arcsin_coefficients(p_terms);
  const FixedPointValue xv = fx_encode(x, cfg);
  const FixedPointValue x2 = fx_mul(xv, xv, ledger, false, cfg);
  FixedPointValue power = xv;
  FixedPointValue acc = fx_mul(power, fx_encode(coef[0], cfg), ledger, true, cfg);
  for (std::size_t k = 1; k < p_terms; ++k) {
    power = fx_mul(power, x2, ledger, false, cfg);
    const FixedPointValue term = fx_mul(power, fx_encode(coef[k], cfg), ledger, true, cfg);
    acc = fx_add(acc, term, ledger, false, cfg);
  }
  r.value = acc;
  return r;
}

}  // namespace dvrforge
