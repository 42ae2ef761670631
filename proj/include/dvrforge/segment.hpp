#pragma once

#include <bit>
#include <cstddef>
#include <string>

#include "dvrforge/error.hpp"

namespace dvrforge {

/// Column segmentation of an N×N DVR matrix into N/F segments of F columns.
///
/// Column q = wF + v, v = v0 2^{f-1} + ... + v_{f-1}; the two seed columns of
/// segment w are q̃-1 and q̃ with q̃ = wF + F/2.
struct SegmentSpec {
  std::size_t N = 0;
  std::size_t F = 0;

  static SegmentSpec make(std::size_t N, std::size_t F) {
    if (N < 4 || !std::has_single_bit(N)) throw ParameterError("segment: N must be a power of two >= 4, got " + std::to_string(N));
    if (F < 4 || !std::has_single_bit(F)) throw ParameterError("segment: F must be a power of two >= 4, got " + std::to_string(F));
    if (F > N) throw ParameterError("segment: F must not exceed N");
    return SegmentSpec{N, F};
  }

  std::size_t n() const { return static_cast<std::size_t>(std::countr_zero(N)); }
  std::size_t f() const { return static_cast<std::size_t>(std::countr_zero(F)); }
  std::size_t segments() const { return N / F; }
  std::size_t first_column(std::size_t w) const { return w * F; }
  std::size_t midpoint(std::size_t w) const { return w * F + F / 2; }
  /// Number of (Û_{2c}, Û_{2c+1}) pairs, c = 1..F/4-1.
  std::size_t recursion_pairs() const { return F / 4 - 1; }

  friend bool operator==(const SegmentSpec&, const SegmentSpec&) = default;
};

/// Decomposition of a column index q into segment and in-segment parts.
struct ColumnIndex {
  std::size_t w = 0;
  std::size_t v = 0;
  unsigned v0 = 0;        // most significant bit of v
  unsigned lsb = 0;       // least significant bit of v
  std::size_t vprime = 0; // v with msb and lsb removed (f-2 bits)

  static ColumnIndex decompose(const SegmentSpec& s, std::size_t q) {
    if (q >= s.N) throw ParameterError("column index out of range");
    ColumnIndex c;
    c.w = q / s.F;
    c.v = q % s.F;
    c.v0 = static_cast<unsigned>(c.v >> (s.f() - 1)) & 1u;
    c.lsb = static_cast<unsigned>(c.v & 1u);
    c.vprime = (c.v & ((s.F >> 1) - 1)) >> 1;
    return c;
  }
};

}  // namespace dvrforge
