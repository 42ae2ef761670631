#pragma once

// Signed fixed-point registers with Toffoli accounting.
//
// Multiplication follows the textbook controlled-adder loop: for each set bit
// a_i of the multiplier, the shifted multiplicand 2^i b is added into the
// accumulator.  Costs are charged from register widths under one of two
// conventions:
//   section3   widths pinned to m: MUL 2m², ADD 4m, controlled ADD 2m
//   appendixC  MUL 2 len(a) len(b), controlled ADD 2 len, ADD 4 len
// A multiplication by a classical constant costs half in both.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "dvrforge/error.hpp"

namespace dvrforge {

enum class FxMode { Widening, Truncating };
enum class CostConvention { Section3, AppendixC };

inline constexpr int kMaxRegisterWidth = 63;

struct FxConfig {
  int m = 16;
  int frac_bits = 14;
  FxMode mode = FxMode::Truncating;
  CostConvention convention = CostConvention::Section3;

  static FxConfig make(int m, int frac_bits, FxMode mode = FxMode::Truncating,
                       CostConvention conv = CostConvention::Section3) {
    if (!(2 <= frac_bits && frac_bits < m && m <= kMaxRegisterWidth))
      throw ParameterError("fixed point: need 2 <= frac_bits < m <= 63, got m=" + std::to_string(m) +
                           " frac_bits=" + std::to_string(frac_bits));
    return FxConfig{m, frac_bits, mode, conv};
  }
  /// Default format for DVR values: two integer bits including sign.
  static FxConfig standard(int m, FxMode mode = FxMode::Truncating, CostConvention conv = CostConvention::Section3) {
    return make(m, m - 2, mode, conv);
  }
};

struct FixedPointValue {
  std::int64_t raw = 0;
  int width = 0;
  int frac_bits = 0;

  friend bool operator==(const FixedPointValue&, const FixedPointValue&) = default;
};

struct LedgerEvent {
  std::string label;
  std::uint64_t count = 0;
  std::uint64_t toffoli = 0;

  friend bool operator==(const LedgerEvent&, const LedgerEvent&) = default;
};

/// Toffoli tally for one computation.  Events are aggregated per label in
/// first-seen order.
struct CostLedger {
  std::uint64_t toffoli = 0;
  std::uint64_t clifford_estimate = 0;  // order of magnitude only
  std::uint64_t ancilla_highwater = 0;
  std::vector<LedgerEvent> events;
  std::uint64_t saturations = 0;
  double max_rounding_error = 0.0;
  bool charging = true;  // false: diagnostics only

  void charge(const std::string& label, std::uint64_t t, std::uint64_t clifford = 0) {
    if (!charging) return;
    toffoli += t;
    clifford_estimate += clifford;
    auto it = std::find_if(events.begin(), events.end(), [&](const LedgerEvent& e) { return e.label == label; });
    if (it == events.end()) {
      events.push_back({label, 1, t});
    } else {
      ++it->count;
      it->toffoli += t;
    }
  }

  void note_ancilla(std::uint64_t width) { ancilla_highwater = std::max(ancilla_highwater, width); }

  void note_rounding(double err) { max_rounding_error = std::max(max_rounding_error, err); }

  std::uint64_t toffoli_for(const std::string& label) const {
    for (const auto& e : events)
      if (e.label == label) return e.toffoli;
    return 0;
  }

  /// Same gate tally (diagnostics excluded).
  bool same_cost(const CostLedger& o) const {
    return toffoli == o.toffoli && clifford_estimate == o.clifford_estimate && events == o.events;
  }

  nlohmann::json to_json() const {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : events) ev.push_back({{"label", e.label}, {"count", e.count}, {"toffoli", e.toffoli}});
    return {{"toffoli", toffoli},
            {"clifford_estimate", clifford_estimate},
            {"ancilla_highwater", ancilla_highwater},
            {"events", ev},
            {"saturations", saturations},
            {"max_rounding_error", max_rounding_error}};
  }
};

namespace detail {

using i128 = __int128;

inline i128 pow2(int k) { return static_cast<i128>(1) << k; }

inline std::int64_t symmetric_limit(int width) { return static_cast<std::int64_t>((static_cast<i128>(1) << (width - 1)) - 1); }

/// Round x / 2^s to nearest, ties to even.
inline i128 shift_round_even(i128 x, int s) {
  if (s <= 0) return x << (-s);
  const i128 q = x >> s;  // floor
  const i128 r = x - (q << s);
  const i128 half = pow2(s - 1);
  if (r > half || (r == half && (q & 1) != 0)) return q + 1;
  return q;
}

inline bool fits(i128 raw, int width) { return raw <= symmetric_limit(width) && raw >= -symmetric_limit(width); }

/// Clamps to ±(2^{w-1} - 1), keeping negation exact.
inline std::int64_t saturate(i128 raw, int width, CostLedger& ledger) {
  const std::int64_t lim = symmetric_limit(width);
  if (raw > lim) {
    ++ledger.saturations;
    return lim;
  }
  if (raw < -lim) {
    ++ledger.saturations;
    return -lim;
  }
  return static_cast<std::int64_t>(raw);
}

}  // namespace detail

inline FixedPointValue fx_encode(double x, const FxConfig& cfg) {
  const double scaled = std::nearbyint(std::ldexp(x, cfg.frac_bits));
  const double lim = std::ldexp(1.0, cfg.m - 1);
  if (!std::isfinite(scaled) || std::abs(scaled) >= lim)
    throw RangeError("fx_encode: " + std::to_string(x) + " does not fit m=" + std::to_string(cfg.m) +
                     " frac_bits=" + std::to_string(cfg.frac_bits));
  return FixedPointValue{static_cast<std::int64_t>(scaled), cfg.m, cfg.frac_bits};
}

/// Encoding that saturates instead of throwing; counts the event.
inline FixedPointValue fx_encode_saturating(double x, const FxConfig& cfg, CostLedger& ledger) {
  const double scaled = std::nearbyint(std::ldexp(x, cfg.frac_bits));
  const double lim = static_cast<double>(detail::symmetric_limit(cfg.m));
  if (std::abs(scaled) > lim) {
    ++ledger.saturations;
    return FixedPointValue{static_cast<std::int64_t>(std::copysign(lim, scaled)), cfg.m, cfg.frac_bits};
  }
  return FixedPointValue{static_cast<std::int64_t>(scaled), cfg.m, cfg.frac_bits};
}

inline double fx_decode(const FixedPointValue& v) { return std::ldexp(static_cast<double>(v.raw), -v.frac_bits); }

/// Exact re-expression at more fractional bits (width grows accordingly).
inline FixedPointValue fx_align(const FixedPointValue& v, int frac_bits) {
  if (frac_bits < v.frac_bits) throw ParameterError("fx_align: can only add fractional bits");
  const int shift = frac_bits - v.frac_bits;
  const int width = v.width + shift;
  if (width > kMaxRegisterWidth) throw ResourceError("fx_align: width " + std::to_string(width) + " exceeds 63 bits");
  return FixedPointValue{static_cast<std::int64_t>(static_cast<detail::i128>(v.raw) << shift), width, frac_bits};
}

// Cost charging, shared with classical emulation paths that do not produce
// fixed-point values.

inline std::uint64_t add_cost(int wa, int wb, bool controlled, const FxConfig& cfg) {
  const std::uint64_t w = cfg.convention == CostConvention::Section3 ? static_cast<std::uint64_t>(cfg.m)
                                                                     : static_cast<std::uint64_t>(std::max(wa, wb));
  return controlled ? 2 * w : 4 * w;
}

inline std::uint64_t mul_cost(int wa, int wb, bool b_is_classical, const FxConfig& cfg) {
  std::uint64_t la = static_cast<std::uint64_t>(wa), lb = static_cast<std::uint64_t>(wb);
  if (cfg.convention == CostConvention::Section3) la = lb = static_cast<std::uint64_t>(cfg.m);
  const std::uint64_t full = 2 * la * lb;
  return b_is_classical ? full / 2 : full;
}

inline std::uint64_t charge_add(CostLedger& ledger, int wa, int wb, bool controlled, const FxConfig& cfg) {
  const std::uint64_t t = add_cost(wa, wb, controlled, cfg);
  ledger.charge(controlled ? "add_controlled" : "add", t, 3 * static_cast<std::uint64_t>(std::max(wa, wb)));
  return t;
}

inline std::uint64_t charge_mul(CostLedger& ledger, int wa, int wb, bool b_is_classical, const FxConfig& cfg) {
  const std::uint64_t t = mul_cost(wa, wb, b_is_classical, cfg);
  ledger.charge(b_is_classical ? "mul_classical" : "mul", t, 3 * static_cast<std::uint64_t>(wa) * static_cast<std::uint64_t>(wb));
  ledger.note_ancilla(static_cast<std::uint64_t>(wa + wb + 1));
  return t;
}

inline FixedPointValue fx_add(const FixedPointValue& a, const FixedPointValue& b, CostLedger& ledger, bool controlled,
                              const FxConfig& cfg) {
  if (a.frac_bits != b.frac_bits)
    throw ParameterError("fx_add: fractional bits differ (" + std::to_string(a.frac_bits) + " vs " +
                         std::to_string(b.frac_bits) + ")");
  charge_add(ledger, a.width, b.width, controlled, cfg);
  const detail::i128 sum = static_cast<detail::i128>(a.raw) + b.raw;
  if (cfg.mode == FxMode::Widening) {
    const int width = std::max(a.width, b.width) + 1;
    if (width > kMaxRegisterWidth) throw ResourceError("fx_add: width " + std::to_string(width) + " exceeds 63 bits");
    return FixedPointValue{static_cast<std::int64_t>(sum), width, a.frac_bits};
  }
  return FixedPointValue{detail::saturate(sum, cfg.m, ledger), cfg.m, a.frac_bits};
}

/// Truncating results land in `cfg` (m bits, cfg.frac_bits); widening results
/// keep every bit: width len(a)+len(b)+1, frac_bits summed.
inline FixedPointValue fx_mul(const FixedPointValue& a, const FixedPointValue& b, CostLedger& ledger, bool b_is_classical,
                              const FxConfig& cfg) {
  charge_mul(ledger, a.width, b.width, b_is_classical, cfg);

  // one controlled addition of 2^i |b| per bit of |a|
  const bool negative = (a.raw < 0) != (b.raw < 0);
  const std::uint64_t ma = a.raw < 0 ? static_cast<std::uint64_t>(-a.raw) : static_cast<std::uint64_t>(a.raw);
  const detail::i128 mb = b.raw < 0 ? -static_cast<detail::i128>(b.raw) : static_cast<detail::i128>(b.raw);
  detail::i128 acc = 0;
  for (int i = 0; i < a.width; ++i)
    if ((ma >> i) & 1u) acc += mb << i;
  if (negative) acc = -acc;

  const int frac = a.frac_bits + b.frac_bits;
  if (cfg.mode == FxMode::Widening) {
    const int width = a.width + b.width + 1;
    if (width > kMaxRegisterWidth)
      throw ResourceError("fx_mul: widening product needs " + std::to_string(width) + " bits, budget is 63");
    return FixedPointValue{static_cast<std::int64_t>(acc), width, frac};
  }
  const int shift = frac - cfg.frac_bits;
  const detail::i128 rounded = detail::shift_round_even(acc, shift);
  if (shift > 0) {
    const detail::i128 diff = acc - (rounded << shift);
    ledger.note_rounding(std::abs(std::ldexp(static_cast<double>(diff), -frac)));
  }
  return FixedPointValue{detail::saturate(rounded, cfg.m, ledger), cfg.m, cfg.frac_bits};
}

/// Rounds a value into cfg's format (m bits, cfg.frac_bits).
inline FixedPointValue fx_round(const FixedPointValue& v, CostLedger& ledger, const FxConfig& cfg) {
  const int shift = v.frac_bits - cfg.frac_bits;
  const detail::i128 rounded = detail::shift_round_even(v.raw, shift);
  if (shift > 0) {
    const detail::i128 diff = static_cast<detail::i128>(v.raw) - (rounded << shift);
    ledger.note_rounding(std::abs(std::ldexp(static_cast<double>(diff), -v.frac_bits)));
  }
  return FixedPointValue{detail::saturate(rounded, cfg.m, ledger), cfg.m, cfg.frac_bits};
}

/// Mirror of a previously computed operation.
inline void fx_uncompute(CostLedger& ledger, std::uint64_t op_cost) { ledger.charge("uncompute", op_cost); }

inline const char* to_string(CostConvention c) { return c == CostConvention::Section3 ? "section3" : "appendixC"; }

inline CostConvention parse_convention(const std::string& s) {
  if (s == "section3") return CostConvention::Section3;
  if (s == "appendixC" || s == "appendixc") return CostConvention::AppendixC;
  throw ParameterError("unknown cost convention '" + s + "' (section3 | appendixC)");
}

}  // namespace dvrforge
