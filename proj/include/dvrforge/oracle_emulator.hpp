#pragma once

// Classical emulation of the segmented recursive DVR oracle.
//
// One query (p, q) runs the whole circuit on basis-state inputs:
//   init      load x_p, T_{p,q̃-1}, T_{p,q̃} (QROM over p and w)
//   S1        swap A,B if v0 = 0
//   U_1       A ⊕= (A'+B'x) B              -> column q̃+1 (v0=1) or q̃-2 (v0=0)
//   c = 1..F/4-1, guarded by |2v-(F-1)| > 4c:
//     U_2c    B ⊕= (A'_q̂ + B'_q̂ x) A
//     U_2c+1  A ⊕= (A'_q̌ + B'_q̌ x) B
//   S2        swap A,B if v0 = 0
//   S3        swap A,B if lsb(v) = 1       -> queried column now in B (= g)
//   g *= γ_q^{-1}
// Every controlled block is charged whether or not it is active, so each query
// carries the same ledger.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dvrforge/dvr_core.hpp"
#include "dvrforge/error.hpp"
#include "dvrforge/fixed_point.hpp"
#include "dvrforge/parallel.hpp"
#include "dvrforge/polyfam.hpp"
#include "dvrforge/segment.hpp"

namespace dvrforge {

enum class QromModel { Select, SelSwap };

/// Toffoli cost of loading the seeds and nodes.
inline std::uint64_t init_cost(const SegmentSpec& s, int m, QromModel model, bool half_load) {
  const double N = static_cast<double>(s.N), F = static_cast<double>(s.F), mm = static_cast<double>(m);
  if (model == QromModel::Select) {
    const std::uint64_t n = s.N, f = s.F;
    return half_load ? n * n / (2 * f) + n / 2 : n * n / f + n;
  }
  const double full = 2.0 * N * std::sqrt(mm) / std::sqrt(F) + std::sqrt(N * mm);
  return static_cast<std::uint64_t>(std::ceil(half_load ? full / std::sqrt(2.0) : full));
}

struct InitializedState {
  SegmentSpec spec;
  PolynomialFamily family = PolynomialFamily::hermite();
  std::vector<double> nodes;     // x_p
  Matrix seeds;                  // seeds(p, 2w) = T_{p,q̃-1}, seeds(p, 2w+1) = T_{p,q̃}
  std::vector<SegmentScaling> scalings;
  Matrix reference;              // full T for error reporting
  bool half_load = false;
  QromModel qrom = QromModel::Select;
  std::vector<std::size_t> loaded_columns;
};

/// Copies the two seed columns of every segment from the reference matrix.  In
/// half-load mode only rows p < N/2 are read; lower rows come from the parity
/// mirror T_{pq} = (-1)^q T_{N-1-p,q}, x_p = -x_{N-1-p}.
inline InitializedState init_segments(const DvrMatrix& ref, const SegmentSpec& spec, QromModel qrom = QromModel::Select,
                                      bool half_load = false) {
  if (ref.N != spec.N) throw ShapeError("init_segments: reference size differs from segment spec");
  if (half_load && !ref.family.is_parity_conserving())
    throw ParameterError("init_segments: half-load mode needs a parity-conserving family");
  InitializedState st;
  st.spec = spec;
  st.family = ref.family;
  st.half_load = half_load;
  st.qrom = qrom;
  st.reference = ref.entries;
  const std::size_t N = spec.N;
  st.nodes.resize(N);
  st.seeds = Matrix(N, 2 * spec.segments());
  for (std::size_t w = 0; w < spec.segments(); ++w) {
    st.loaded_columns.push_back(spec.midpoint(w) - 1);
    st.loaded_columns.push_back(spec.midpoint(w));
  }
  const std::size_t rows = half_load ? N / 2 : N;
  for (std::size_t p = 0; p < rows; ++p) {
    st.nodes[p] = ref.quadrature.nodes[p];
    for (std::size_t k = 0; k < st.loaded_columns.size(); ++k) st.seeds(p, k) = ref(p, st.loaded_columns[k]);
  }
  for (std::size_t p = rows; p < N; ++p) {
    const std::size_t mirror = N - 1 - p;
    st.nodes[p] = -st.nodes[mirror];
    for (std::size_t k = 0; k < st.loaded_columns.size(); ++k) {
      const double sign = st.loaded_columns[k] % 2 == 0 ? 1.0 : -1.0;
      st.seeds(p, k) = sign * st.seeds(mirror, k);
    }
  }
  st.scalings.reserve(spec.segments());
  for (std::size_t w = 0; w < spec.segments(); ++w) st.scalings.push_back(gamma_scalings(ref.coeffs, spec, w));
  return st;
}

/// (q̂, q̌) for step c.
inline std::pair<std::size_t, std::size_t> index_maps(const SegmentSpec& s, unsigned v0, std::size_t w, std::size_t c) {
  if (c < 1 || c > s.recursion_pairs())
    throw ParameterError("index_maps: c must lie in 1.." + std::to_string(s.recursion_pairs()) + ", got " + std::to_string(c));
  if (w >= s.segments()) throw ParameterError("index_maps: segment out of range");
  const std::size_t mid = s.midpoint(w);
  if (v0) return {mid + 2 * c, mid + 2 * c + 1};
  return {mid - 1 - 2 * c, mid - 2 - 2 * c};
}

/// Activity condition |v - (F-1)/2| > 2c in integers.
inline bool step_active(const SegmentSpec& s, std::size_t v, std::size_t c) {
  const long long d = 2 * static_cast<long long>(v) - (static_cast<long long>(s.F) - 1);
  return std::llabs(d) > 4 * static_cast<long long>(c);
}

// ---------------------------------------------------------------------------
// Arithmetic back ends

struct Arithmetic {
  bool fixed = false;
  FxConfig cfg = FxConfig::standard(16);  // cost widths always come from here
  bool round_product_first = true;

  static Arithmetic double_precision(int cost_m = 16, CostConvention conv = CostConvention::Section3) {
    return Arithmetic{false, FxConfig::standard(cost_m, FxMode::Truncating, conv), true};
  }
  static Arithmetic fixed_point(const FxConfig& cfg, bool round_product_first = true) {
    return Arithmetic{true, cfg, round_product_first};
  }
  std::string describe() const {
    if (!fixed) return "double";
    return "fx:m=" + std::to_string(cfg.m) + ",frac=" + std::to_string(cfg.frac_bits) +
           (cfg.mode == FxMode::Widening ? ",widening" : ",truncating");
  }
};

namespace detail {

struct DoubleBackend {
  using Value = double;
  int m;
  const InitializedState* st;

  Value seed(double v, CostLedger&) const { return v; }
  Value node(std::size_t p, CostLedger&) const { return st->nodes[p]; }
  /// reg_acc + (A'_v + B'_v x) reg_mul
  Value mac(Value acc, std::size_t w, std::size_t v, Value x, Value reg, CostLedger&) const {
    const auto& sc = st->scalings[w];
    return acc + (sc.a_prime[v] + sc.b_prime[v] * x) * reg;
  }
  Value rescale(Value g, std::size_t w, std::size_t v, CostLedger&) const { return g / st->scalings[w].gamma[v]; }
  double decode(Value v) const { return v; }
  int width(Value) const { return m; }
};

/// Register formats are fixed from the classical data: integer bits are sized
/// to the largest node, coefficient and reciprocal magnitude.
inline FxConfig format_for(double max_abs, int m, FxMode mode, CostConvention conv, const char* what) {
  int ib = 0;
  while (max_abs * (1.0 + std::ldexp(1.0, -(m - 3))) >= std::ldexp(1.0, ib)) ++ib;
  const int frac = m - 1 - ib;
  if (frac < 2)
    throw ParameterError(std::string("fixed point: m=") + std::to_string(m) + " leaves no fractional bits for " + what +
                         " (max magnitude " + std::to_string(max_abs) + ")");
  return FxConfig::make(m, frac, mode, conv);
}

struct FixedBackend {
  using Value = FixedPointValue;
  const InitializedState* st;
  FxConfig val, xf, bf, kf, gf;
  bool round_product_first = true;
  std::vector<std::vector<FixedPointValue>> a_enc, b_enc, ginv_enc;  // [w][v]
  std::vector<FixedPointValue> x_enc;

  FixedBackend(const InitializedState& s, const FxConfig& cfg, bool rpf) : st(&s), val(cfg), round_product_first(rpf) {
    double max_x = 0.0, max_b = 0.0, max_k = 0.0, max_g = 0.0;
    for (double x : s.nodes) max_x = std::max(max_x, std::abs(x));
    for (const auto& sc : s.scalings)
      for (std::size_t v = 0; v < sc.gamma.size(); ++v) {
        max_b = std::max(max_b, std::abs(sc.b_prime[v]));
        max_k = std::max({max_k, std::abs(sc.a_prime[v]) + std::abs(sc.b_prime[v]) * max_x});
        max_g = std::max(max_g, 1.0 / std::abs(sc.gamma[v]));
      }
    const int m = cfg.m;
    xf = format_for(max_x, m, cfg.mode, cfg.convention, "nodes");
    bf = format_for(max_b, m, cfg.mode, cfg.convention, "B'");
    kf = format_for(max_k, m, cfg.mode, cfg.convention, "A'+B'x");
    gf = format_for(max_g, m, cfg.mode, cfg.convention, "1/gamma");
    CostLedger sink;
    for (double x : s.nodes) x_enc.push_back(fx_encode(x, xf));
    for (const auto& sc : s.scalings) {
      std::vector<FixedPointValue> av, bv, gv;
      for (std::size_t v = 0; v < sc.gamma.size(); ++v) {
        av.push_back(fx_encode(sc.a_prime[v], kf));
        bv.push_back(fx_encode(sc.b_prime[v], bf));
        gv.push_back(fx_encode(1.0 / sc.gamma[v], gf));
      }
      a_enc.push_back(std::move(av));
      b_enc.push_back(std::move(bv));
      ginv_enc.push_back(std::move(gv));
    }
  }

  static CostLedger scratch() {
    CostLedger l;
    l.charging = false;
    return l;
  }
  static void absorb(CostLedger& into, const CostLedger& diag) {
    into.saturations += diag.saturations;
    into.note_rounding(diag.max_rounding_error);
  }

  Value seed(double v, CostLedger& diag) const { return fx_encode_saturating(v, val, diag); }
  Value node(std::size_t p, CostLedger&) const { return x_enc[p]; }

  Value mac(Value acc, std::size_t w, std::size_t v, Value x, Value reg, CostLedger& diag) const {
    CostLedger d = scratch();
    Value bx = fx_mul(b_enc[w][v], x, d, false, kf);
    Value a = a_enc[w][v];
    if (val.mode == FxMode::Widening) a = fx_align(a, bx.frac_bits);
    const Value k = fx_add(a, bx, d, false, kf);
    Value out;
    if (val.mode == FxMode::Widening) {
      Value prod = fx_mul(k, reg, d, false, val);
      out = fx_add(fx_align(acc, prod.frac_bits), prod, d, true, val);
    } else if (round_product_first) {
      out = fx_add(acc, fx_mul(k, reg, d, false, val), d, true, val);
    } else {
      FxConfig exact = val;
      exact.mode = FxMode::Widening;
      const Value prod = fx_mul(k, reg, d, false, exact);
      FxConfig wide = exact;
      wide.m = kMaxRegisterWidth;
      const Value sum = fx_add(fx_align(acc, prod.frac_bits), prod, d, true, wide);
      out = fx_round(sum, d, val);
    }
    absorb(diag, d);
    return out;
  }

  Value rescale(Value g, std::size_t w, std::size_t v, CostLedger& diag) const {
    CostLedger d = scratch();
    Value out = fx_mul(g, ginv_enc[w][v], d, false, val);
    absorb(diag, d);
    return out;
  }
  double decode(Value v) const { return fx_decode(v); }
  int width(Value v) const { return v.width; }
};

}  // namespace detail

struct QueryResult {
  double value = 0.0;
  CostLedger ledger;
  std::vector<double> step_error;  // index 0: U_1, c: pair c, last: rescaled output
  std::size_t guard_violations = 0;
  bool label_ok = true;
};

namespace detail {

template <class Backend>
QueryResult run_query(const InitializedState& st, const Backend& be, const FxConfig& cost, std::size_t p, std::size_t q) {
  using V = typename Backend::Value;
  const SegmentSpec& s = st.spec;
  if (p >= s.N || q >= s.N) throw ParameterError("query: index out of range");
  const auto ix = ColumnIndex::decompose(s, q);
  const auto& sc = st.scalings[ix.w];
  const std::size_t base = s.first_column(ix.w);
  const std::uint64_t NF = s.N / s.F;
  const std::uint64_t fm2 = s.f() - 2;
  const auto m = static_cast<std::uint64_t>(cost.m);

  QueryResult r;
  r.step_error.assign(s.recursion_pairs() + 2, 0.0);
  CostLedger& L = r.ledger;

  auto scaled_ref = [&](std::size_t col) { return sc.gamma[col - base] * st.reference(p, col); };

  // init
  L.charge("qrom_init", init_cost(s, cost.m, st.qrom, st.half_load));
  const V x = be.node(p, L);
  V A = be.seed(st.seeds(p, 2 * ix.w), L);
  V B = be.seed(st.seeds(p, 2 * ix.w + 1), L);
  std::size_t la = s.midpoint(ix.w) - 1, lb = s.midpoint(ix.w);

  auto cswap = [&](bool ctrl) {
    L.charge("swap", m);
    if (ctrl) {
      std::swap(A, B);
      std::swap(la, lb);
    }
  };

  // one guarded block; `into_b` selects B ⊕= k A versus A ⊕= k B
  auto block = [&](std::size_t target, bool into_b, bool active, bool first, std::size_t step) {
    const int wx = be.width(x);
    const int wreg = be.width(into_b ? A : B);
    if (!first) L.charge("compare", fm2);
    L.charge("qrom_coeff", NF);  // A'
    L.charge("qrom_coeff", NF);  // B'
    const std::uint64_t mul1 = charge_mul(L, cost.m, wx, false, cost);
    std::uint64_t add1 = 0;
    if (first) add1 = charge_add(L, cost.m, cost.m, false, cost);
    const std::uint64_t mul2 = charge_mul(L, cost.m, wreg, false, cost);
    const std::uint64_t addin = charge_add(L, cost.m, cost.m, true, cost);
    fx_uncompute(L, mul1);
    fx_uncompute(L, mul2);
    if (first) {
      fx_uncompute(L, add1);
      fx_uncompute(L, 2 * NF);
    } else {
      fx_uncompute(L, addin);
    }
    if (!active) return;
    const std::size_t v = target - base;
    std::size_t& lab = into_b ? lb : la;
    if (lab == q) ++r.guard_violations;
    if (into_b)
      B = be.mac(B, ix.w, v, x, A, L);
    else
      A = be.mac(A, ix.w, v, x, B, L);
    lab = target;
    const double got = be.decode(into_b ? B : A);
    r.step_error[step] = std::max(r.step_error[step], std::abs(got - scaled_ref(target)));
  };

  cswap(ix.v0 == 0);
  const std::size_t t1 = ix.v0 ? s.midpoint(ix.w) + 1 : s.midpoint(ix.w) - 2;
  block(t1, false, true, true, 0);

  for (std::size_t c = 1; c <= s.recursion_pairs(); ++c) {
    const auto [qh, qc] = index_maps(s, ix.v0, ix.w, c);
    const bool active = step_active(s, ix.v, c);
    block(qh, true, active, false, c);
    block(qc, false, active, false, c);
  }

  cswap(ix.v0 == 0);
  cswap(ix.lsb == 1);
  r.label_ok = (lb == q);

  L.charge("qrom_gamma", s.N);
  charge_mul(L, cost.m, be.width(B), false, cost);
  const V out = be.rescale(B, ix.w, ix.v, L);
  r.value = be.decode(out);
  r.step_error.back() = std::abs(r.value - st.reference(p, q));
  return r;
}

}  // namespace detail

struct EmulationReport {
  SegmentSpec spec;
  std::string family;
  std::string arithmetic;
  Matrix matrix_out;
  double max_abs_error = 0.0;
  std::vector<double> per_step_error;  // running maximum over steps
  CostLedger ledger;                   // per query; identical for every query
  bool ledgers_consistent = true;
  std::uint64_t overflow_events = 0;
  std::size_t guard_violations = 0;
  std::size_t label_mismatches = 0;
  std::size_t queries = 0;
  std::vector<std::string> notes;

  nlohmann::json to_json() const {
    return {{"N", spec.N},
            {"F", spec.F},
            {"family", family},
            {"arithmetic", arithmetic},
            {"max_abs_error", max_abs_error},
            {"per_step_error", per_step_error},
            {"ledger", ledger.to_json()},
            {"ledgers_consistent", ledgers_consistent},
            {"overflow_events", overflow_events},
            {"guard_violations", guard_violations},
            {"label_mismatches", label_mismatches},
            {"queries", queries},
            {"notes", notes}};
  }
};

/// Single-query front end over an initialized state.
class OracleEmulator {
 public:
  OracleEmulator(InitializedState st, Arithmetic arith) : st_(std::move(st)), arith_(arith) {
    if (arith_.fixed) fixed_.emplace(st_, arith_.cfg, arith_.round_product_first);
  }
  // the fixed backend points into st_
  OracleEmulator(const OracleEmulator&) = delete;
  OracleEmulator& operator=(const OracleEmulator&) = delete;

  const InitializedState& state() const { return st_; }
  const Arithmetic& arithmetic() const { return arith_; }

  QueryResult query_detail(std::size_t p, std::size_t q) const {
    if (arith_.fixed) return detail::run_query(st_, *fixed_, arith_.cfg, p, q);
    return detail::run_query(st_, detail::DoubleBackend{arith_.cfg.m, &st_}, arith_.cfg, p, q);
  }

  double query(std::size_t p, std::size_t q) const { return query_detail(p, q).value; }

 private:
  InitializedState st_;
  Arithmetic arith_;
  std::optional<detail::FixedBackend> fixed_;  // empty in double mode
};

/// Runs every (p, q) query and compares with the reference.
inline EmulationReport run_recursion(const OracleEmulator& em) {
  const auto& st = em.state();
  const std::size_t N = st.spec.N;
  EmulationReport rep;
  rep.spec = st.spec;
  rep.family = st.family.tag();
  rep.arithmetic = em.arithmetic().describe();
  rep.matrix_out = Matrix(N, N);
  rep.queries = N * N;

  std::vector<std::vector<QueryResult>> rows(N);
  parallel_for(N, [&](std::size_t p) {
    rows[p].reserve(N);
    for (std::size_t q = 0; q < N; ++q) rows[p].push_back(em.query_detail(p, q));
  });

  rep.per_step_error.assign(st.spec.recursion_pairs() + 2, 0.0);
  rep.ledger = rows[0][0].ledger;
  rep.ledger.saturations = 0;
  rep.ledger.max_rounding_error = 0.0;
  for (std::size_t p = 0; p < N; ++p)
    for (std::size_t q = 0; q < N; ++q) {
      const auto& r = rows[p][q];
      rep.matrix_out(p, q) = r.value;
      rep.max_abs_error = std::max(rep.max_abs_error, std::abs(r.value - st.reference(p, q)));
      if (!r.ledger.same_cost(rows[0][0].ledger)) rep.ledgers_consistent = false;
      rep.overflow_events += r.ledger.saturations;
      rep.ledger.note_rounding(r.ledger.max_rounding_error);
      rep.guard_violations += r.guard_violations;
      if (!r.label_ok) ++rep.label_mismatches;
      for (std::size_t s = 0; s < r.step_error.size(); ++s)
        rep.per_step_error[s] = std::max(rep.per_step_error[s], r.step_error[s]);
    }
  rep.ledger.saturations = rep.overflow_events;
  for (std::size_t s = 1; s < rep.per_step_error.size(); ++s)
    rep.per_step_error[s] = std::max(rep.per_step_error[s], rep.per_step_error[s - 1]);
  if (st.spec.recursion_pairs() == 0) rep.notes.push_back("empty recursion: F=4 has no (U_2c, U_2c+1) pairs");
  if (st.half_load) rep.notes.push_back("half-load: rows p >= N/2 mirrored from the upper half");
  if (em.arithmetic().fixed && rep.overflow_events > 0)
    rep.notes.push_back("fixed-point saturation occurred " + std::to_string(rep.overflow_events) + " times");
  return rep;
}

inline EmulationReport run_recursion(const DvrMatrix& ref, const SegmentSpec& spec, const Arithmetic& arith,
                                     QromModel qrom = QromModel::Select, bool half_load = false) {
  return run_recursion(OracleEmulator(init_segments(ref, spec, qrom, half_load), arith));
}

}  // namespace dvrforge
