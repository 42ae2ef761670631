#pragma once

// Closed-form Toffoli / qubit / volume models for the DVR oracle and the DVR
// unitary constructions.  Square roots in counts are rounded up.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dvrforge/error.hpp"
#include "dvrforge/format.hpp"
#include "dvrforge/parallel.hpp"

namespace dvrforge {

enum class Method { LKS, REC, REC_LKS, REC_PARITY, REFLECTIONS, BE_QROM, BE_ARITH };
enum class Unit { Toffoli, TGate };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::LKS: return "lks";
    case Method::REC: return "rec";
    case Method::REC_LKS: return "rec-lks";
    case Method::REC_PARITY: return "rec-parity";
    case Method::REFLECTIONS: return "reflections";
    case Method::BE_QROM: return "be-qrom";
    case Method::BE_ARITH: return "be-arith";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::LKS, Method::REC, Method::REC_LKS, Method::REC_PARITY, Method::REFLECTIONS, Method::BE_QROM,
                   Method::BE_ARITH})
    if (s == to_string(m)) return m;
  throw ParameterError("unknown method '" + s + "' (lks | rec | rec-lks | rec-parity | reflections | be-qrom | be-arith)");
}

inline const char* to_string(Unit u) { return u == Unit::Toffoli ? "toffoli" : "tgate"; }

inline Unit parse_unit(const std::string& s) {
  if (s == "toffoli") return Unit::Toffoli;
  if (s == "tgate") return Unit::TGate;
  throw ParameterError("unknown unit '" + s + "' (toffoli | tgate)");
}

/// One Toffoli is counted as 4 T gates in tgate units.
inline constexpr std::uint64_t kTPerToffoli = 4;

struct CostReport {
  Method method = Method::REC;
  std::uint64_t N = 0, m = 0, F = 0, p_terms = 0;
  bool parity = false;
  bool dominant_only = false;
  Unit unit = Unit::Toffoli;
  std::uint64_t t_count = 0;
  std::uint64_t t_depth = 0;
  std::uint64_t qubits = 0;
  std::uint64_t volume = 0;
  std::vector<std::pair<std::string, std::uint64_t>> breakdown;  // Toffoli, before unit scaling
  std::vector<std::string> notes;

  nlohmann::json to_json() const {
    nlohmann::json b = nlohmann::json::object();
    for (const auto& [k, v] : breakdown) b[k] = v;
    nlohmann::json j = {{"method", to_string(method)},
                        {"N", N},
                        {"m", m},
                        {"parity", parity},
                        {"dominant_only", dominant_only},
                        {"unit", to_string(unit)},
                        {"t_count", t_count},
                        {"t_depth", t_depth},
                        {"qubits", qubits},
                        {"volume", volume},
                        {"breakdown", b},
                        {"notes", notes}};
    if (F) j["F"] = F;
    if (p_terms) j["p_terms"] = p_terms;
    return j;
  }
};

namespace detail {

inline std::uint64_t ceil_u(double x) { return static_cast<std::uint64_t>(std::ceil(x - 1e-9 * std::max(1.0, x))); }

inline std::uint64_t log2_exact(std::uint64_t N, const char* what) {
  if (N < 1 || !std::has_single_bit(N)) throw ParameterError(std::string(what) + " must be a power of two");
  return static_cast<std::uint64_t>(std::countr_zero(N));
}

inline void finish(CostReport& r, std::uint64_t toffoli, Unit unit) {
  r.unit = unit;
  r.t_count = unit == Unit::TGate ? kTPerToffoli * toffoli : toffoli;
  r.t_depth = r.t_count;  // serial schedule: depth equals count
  r.volume = r.qubits * r.t_count;
}

inline void validate_oracle(std::uint64_t N, std::uint64_t m, std::uint64_t F, bool needs_f) {
  log2_exact(N, "N");
  if (N < 4) throw ParameterError("N must be >= 4");
  if (m < 4) throw ParameterError("m must be >= 4");
  if (needs_f) {
    log2_exact(F, "F");
    if (F < 4 || F > N) throw ParameterError("F must satisfy 4 <= F <= N");
  }
}

}  // namespace detail

// Individual terms of the recursive oracle, exact integers.

inline std::uint64_t select_init_cost(std::uint64_t N, std::uint64_t F, bool parity) {
  return parity ? N * N / (2 * F) + N / 2 : N * N / F + N;
}

inline std::uint64_t selswap_init_cost(std::uint64_t N, std::uint64_t m, std::uint64_t F, bool parity) {
  const double full = 2.0 * static_cast<double>(N) * std::sqrt(static_cast<double>(m)) / std::sqrt(static_cast<double>(F)) +
                      std::sqrt(static_cast<double>(N * m));
  return detail::ceil_u(parity ? full / std::sqrt(2.0) : full);
}

/// C(U_1): 4N/F + 8m² + 10m
inline std::uint64_t u1_cost(std::uint64_t N, std::uint64_t m, std::uint64_t F) { return 4 * N / F + 8 * m * m + 10 * m; }

/// (F/4 - 1)(16m² + 8m + 4N/F + 2(f-2))
inline std::uint64_t recursive_block_cost(std::uint64_t N, std::uint64_t m, std::uint64_t F) {
  const std::uint64_t f = static_cast<std::uint64_t>(std::countr_zero(F));
  return (F / 4 - 1) * (16 * m * m + 8 * m + 4 * N / F + 2 * (f - 2));
}

inline std::uint64_t gamma_cost(std::uint64_t N, std::uint64_t m) { return N + 2 * m * m; }
inline std::uint64_t swap_cost(std::uint64_t m) { return 3 * m; }

/// Oracle construction cost.  REC uses SELECT initialization, REC_LKS the
/// SELSWAP one; REC_PARITY is REC with the halved loading terms.
inline CostReport cost_oracle(Method method, std::uint64_t N, std::uint64_t m, std::uint64_t F, bool parity = false,
                              bool dominant_only = false, Unit unit = Unit::Toffoli) {
  if (method == Method::REC_PARITY) {
    method = Method::REC;
    parity = true;
  }
  CostReport r;
  r.method = parity && method == Method::REC ? Method::REC_PARITY : method;
  r.N = N;
  r.m = m;
  r.parity = parity;
  r.dominant_only = dominant_only;
  const double sm = std::sqrt(static_cast<double>(m));

  if (method == Method::LKS) {
    detail::validate_oracle(N, m, 0, false);
    const double t = static_cast<double>(N) * sm;
    const std::uint64_t toff = detail::ceil_u(parity ? t / 2.0 : t);
    r.qubits = detail::ceil_u(t);
    r.breakdown.push_back({"selswap", toff});
    detail::finish(r, toff, unit);
    return r;
  }
  if (method != Method::REC && method != Method::REC_LKS)
    throw ParameterError(std::string("cost_oracle: ") + to_string(method) + " is not an oracle method");

  detail::validate_oracle(N, m, F, true);
  r.F = F;
  const std::uint64_t n = detail::log2_exact(N, "N");
  const bool selswap = method == Method::REC_LKS;
  if (selswap) {
    r.qubits = detail::ceil_u(static_cast<double>(N) * std::sqrt(static_cast<double>(m) / static_cast<double>(F))) +
               detail::ceil_u(std::sqrt(static_cast<double>(N * m))) + 2 * n + 6 * m;
  } else {
    r.qubits = 2 * n + 9 * m;
  }

  std::uint64_t toff = 0;
  if (dominant_only) {
    const std::uint64_t arith = 4 * F * m * m;
    std::uint64_t load;
    if (selswap) {
      const double v = static_cast<double>(N) * (std::sqrt(static_cast<double>(m) / static_cast<double>(F)) + 1.0);
      load = detail::ceil_u(parity ? v / std::sqrt(2.0) : v);
    } else {
      load = parity ? N * N / (2 * F) : N * N / F;
    }
    r.breakdown = {{"arithmetic", arith}, {"loading", load}};
    toff = arith + load;
  } else {
    const std::uint64_t init = selswap ? selswap_init_cost(N, m, F, parity) : select_init_cost(N, F, parity);
    r.breakdown = {{"init", init},
                   {"u1", u1_cost(N, m, F)},
                   {"recursive_block", recursive_block_cost(N, m, F)},
                   {"swaps", swap_cost(m)},
                   {"gamma", gamma_cost(N, m)}};
    for (const auto& [k, v] : r.breakdown) toff += v;
    if (parity) r.notes.push_back("free-term removal saving (2m per step) is not part of the closed form and is not applied");
  }
  detail::finish(r, toff, unit);
  return r;
}

/// m + m²(m-1)/2, rounded up.
inline std::uint64_t controlled_rotation_cost(std::uint64_t m) { return m + (m * m * (m - 1) + 1) / 2; }

inline std::uint64_t state_prep_cost(std::uint64_t N, std::uint64_t m) {
  const std::uint64_t n = detail::log2_exact(N, "N");
  return N + 2 * (n > 0 ? n - 1 : 0) * m;
}

/// Without parity every level runs over all N rows: 2(N-1) + 2nm.
inline std::uint64_t state_prep_cost_general(std::uint64_t N, std::uint64_t m) {
  const std::uint64_t n = detail::log2_exact(N, "N");
  return 2 * (N - 1) + 2 * n * m;
}

inline std::uint64_t single_reflection_cost(std::uint64_t N, std::uint64_t m) {
  const std::uint64_t n = detail::log2_exact(N, "N");
  return 2 * N + (4 * m + 1) * n;
}

/// Unitary synthesis costs: reflections, block encoding with QROM, block
/// encoding with a Taylor-series arcsin.
inline CostReport cost_unitary(Method method, std::uint64_t N, std::uint64_t m, std::uint64_t p_terms = 5,
                               bool dominant_only = true, Unit unit = Unit::Toffoli) {
  const std::uint64_t n = detail::log2_exact(N, "N");
  if (m < 1) throw ParameterError("m must be >= 1");
  CostReport r;
  r.method = method;
  r.N = N;
  r.m = m;
  r.dominant_only = dominant_only;
  std::uint64_t toff = 0;
  switch (method) {
    case Method::REFLECTIONS: {
      toff = 2 * N * N + N * (4 * m + 1) * n;
      r.breakdown = {{"per_reflection", single_reflection_cost(N, m)},
                     {"state_prep", state_prep_cost(N, m)},
                     {"reflections", N}};
      r.qubits = n + 2 * m + 2;
      r.notes.push_back("qubits: ancilla + n index qubits + (m+1)-bit angle register + m-bit phase gradient (estimate)");
      break;
    }
    case Method::BE_QROM: {
      const std::uint64_t rot = controlled_rotation_cost(m);
      toff = dominant_only ? N * (N * N + m * m * m) : N * (N * N + rot);
      r.breakdown = {{"select_oracle", N * N}, {"controlled_rotation", rot}, {"amplification_factor", N}};
      r.qubits = 2 * n + m + 1;
      r.notes.push_back("qubits: row/column registers + m-bit value + rotation target (estimate)");
      break;
    }
    case Method::BE_ARITH: {
      if (p_terms < 1) throw ParameterError("p_terms must be >= 1");
      r.p_terms = p_terms;
      toff = N * N + 3 * p_terms * m * m + (dominant_only ? 0 : p_terms * m);
      r.breakdown = {{"qrom", N * N}, {"powers", 2 * p_terms * m * m}, {"accumulate", p_terms * (m * m + m)}};
      r.qubits = 2 * n + (p_terms + 2) * m;
      r.notes.push_back("qubits: p+1 power registers and an accumulator (estimate)");
      break;
    }
    default:
      throw ParameterError(std::string("cost_unitary: ") + to_string(method) + " is not a unitary method");
  }
  detail::finish(r, toff, unit);
  return r;
}

// ---------------------------------------------------------------------------
// Volume sweep

/// Leading-order volumes: LKS N²m, REC 36Fm³ + 9mN²/F (dominant qubits 9m).
inline std::uint64_t leading_volume_lks(std::uint64_t N, std::uint64_t m) { return N * N * m; }
inline std::uint64_t leading_volume_rec(std::uint64_t N, std::uint64_t m, std::uint64_t F) {
  return 36 * F * m * m * m + 9 * m * N * N / F;
}

enum class FStrategy { PowerOfTwo, Continuous };

struct SweepCell {
  std::uint64_t N = 0, m = 0;
  double F_opt = 0.0;
  std::uint64_t t_lks = 0, t_rec = 0, q_lks = 0, q_rec = 0;
  double vol_lks = 0.0, vol_rec = 0.0;
  double ratio = 0.0;  // vol_rec / vol_lks
  bool rec_advantage() const { return vol_rec < vol_lks; }

  nlohmann::json to_json() const {
    return {{"N", N}, {"m", m}, {"F_opt", F_opt}, {"t_lks", t_lks}, {"t_rec", t_rec}, {"q_lks", q_lks},
            {"q_rec", q_rec}, {"vol_lks", vol_lks}, {"vol_rec", vol_rec}, {"ratio", ratio},
            {"rec_advantage", rec_advantage()}};
  }
};

struct SweepResult {
  std::vector<std::uint64_t> Ns, ms;
  std::vector<SweepCell> cells;  // sorted by N, then m
  /// smallest N with REC advantage per m (nullopt: none in range)
  std::vector<std::optional<std::uint64_t>> boundary;
  /// continuous equal-volume line N = 36m from 36Nm² = N²m
  std::vector<double> isoline;

  nlohmann::json to_json() const {
    nlohmann::json cs = nlohmann::json::array(), bd = nlohmann::json::array();
    for (const auto& c : cells) cs.push_back(c.to_json());
    for (std::size_t j = 0; j < ms.size(); ++j)
      bd.push_back({{"m", ms[j]}, {"first_N", boundary[j] ? nlohmann::json(*boundary[j]) : nlohmann::json(nullptr)},
                    {"isoline_N", isoline[j]}});
    return {{"cells", cs}, {"boundary", bd}};
  }

  std::string to_csv() const {
    std::string out = "N,m,F_opt,t_lks,t_rec,q_lks,q_rec,vol_lks,vol_rec,ratio\n";
    for (const auto& c : cells)
      out += std::to_string(c.N) + "," + std::to_string(c.m) + "," + shortest_repr(c.F_opt) + "," +
             std::to_string(c.t_lks) + "," + std::to_string(c.t_rec) + "," + std::to_string(c.q_lks) + "," +
             std::to_string(c.q_rec) + "," + shortest_repr(c.vol_lks) + "," + shortest_repr(c.vol_rec) + "," +
             shortest_repr(c.ratio) + "\n";
    return out;
  }
};

/// Best power-of-two F (4 <= F <= N) for the leading-order REC volume; ties go to the smaller F.
inline std::uint64_t optimal_f(std::uint64_t N, std::uint64_t m) {
  std::uint64_t best = 4, best_vol = leading_volume_rec(N, m, 4);
  for (std::uint64_t F = 8; F <= N; F *= 2) {
    const std::uint64_t v = leading_volume_rec(N, m, F);
    if (v < best_vol) {
      best = F;
      best_vol = v;
    }
  }
  return best;
}

inline SweepCell sweep_cell(std::uint64_t N, std::uint64_t m, FStrategy strategy) {
  SweepCell c;
  c.N = N;
  c.m = m;
  const auto lks = cost_oracle(Method::LKS, N, m, 0);
  c.t_lks = lks.t_count;
  c.q_lks = lks.qubits;
  c.vol_lks = static_cast<double>(leading_volume_lks(N, m));
  if (strategy == FStrategy::PowerOfTwo) {
    const std::uint64_t F = optimal_f(N, m);
    c.F_opt = static_cast<double>(F);
    c.t_rec = 4 * F * m * m + N * N / F;
    c.vol_rec = static_cast<double>(leading_volume_rec(N, m, F));
  } else {
    const double F = static_cast<double>(N) / (2.0 * static_cast<double>(m));
    const double Nd = static_cast<double>(N), md = static_cast<double>(m);
    c.F_opt = F;
    c.t_rec = detail::ceil_u(4.0 * F * md * md + Nd * Nd / F);
    c.vol_rec = 36.0 * Nd * md * md;
  }
  c.q_rec = 9 * m;
  c.ratio = c.vol_rec / c.vol_lks;
  return c;
}

inline SweepResult volume_sweep(const std::vector<std::uint64_t>& Ns, const std::vector<std::uint64_t>& ms,
                                FStrategy strategy = FStrategy::PowerOfTwo) {
  if (Ns.empty() || ms.empty()) throw ParameterError("volume_sweep: ranges must be nonempty");
  SweepResult res;
  res.Ns = Ns;
  res.ms = ms;
  std::sort(res.Ns.begin(), res.Ns.end());
  std::sort(res.ms.begin(), res.ms.end());
  res.cells.resize(res.Ns.size() * res.ms.size());
  parallel_for(res.Ns.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < res.ms.size(); ++j) res.cells[i * res.ms.size() + j] = sweep_cell(res.Ns[i], res.ms[j], strategy);
  });
  for (std::size_t j = 0; j < res.ms.size(); ++j) {
    std::optional<std::uint64_t> first;
    for (std::size_t i = 0; i < res.Ns.size(); ++i)
      if (res.cells[i * res.ms.size() + j].rec_advantage()) {
        first = res.Ns[i];
        break;
      }
    res.boundary.push_back(first);
    res.isoline.push_back(36.0 * static_cast<double>(res.ms[j]));
  }
  return res;
}

/// For every m, advantage never disappears once it appears as N grows.
inline bool advantage_monotone_in_n(const SweepResult& r) {
  for (std::size_t j = 0; j < r.ms.size(); ++j) {
    bool seen = false;
    for (std::size_t i = 0; i < r.Ns.size(); ++i) {
      const bool adv = r.cells[i * r.ms.size() + j].rec_advantage();
      if (seen && !adv) return false;
      seen = seen || adv;
    }
  }
  return true;
}

/// Powers of two lo..hi inclusive.
inline std::vector<std::uint64_t> power_range(std::uint64_t lo, std::uint64_t hi) {
  detail::log2_exact(lo, "range start");
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = lo; v <= hi; v *= 2) out.push_back(v);
  return out;
}

inline std::vector<std::uint64_t> int_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

}  // namespace dvrforge
