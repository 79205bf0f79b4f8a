#pragma once

#include "padlab/core.hpp"

namespace padlab {

// Interval (zealous) arithmetic over Qp. An interval is a PadicScalar with
// finite absolute precision; the operations return the exact image sets
//
//   I + I' = a + a' + O(p^min(N,N'))
//   I - I' = a - a' + O(p^min(N,N'))
//   I * I' = a a'   + O(p^min(v+N', N+v'))
//   I / I' = a / a' + O(p^min(v+N'-2v', N-v'))     (0 not in I')
//
// Mixed exact/inexact operands coerce the exact side to the partner's
// precision plus a headroom; two exact operands are combined exactly.

inline constexpr long kExactCoercionHeadroom = 64;

PadicScalar zadd(const PadicScalar& a, const PadicScalar& b);
PadicScalar zsub(const PadicScalar& a, const PadicScalar& b);
PadicScalar zmul(const PadicScalar& a, const PadicScalar& b);
/// Throws InexactZeroDivision when 0 lies in the divisor.
PadicScalar zdiv(const PadicScalar& a, const PadicScalar& b);
PadicScalar zneg(const PadicScalar& a);

/// p-th power of a unit, with the extra digit the plain product rule misses:
/// returns a^p + O(p^(N+1)). Requires val = 0 and rel >= 1.
PadicScalar zpow_p(const PadicScalar& a);

/// Replace x by its canonical representative declared at precision O(p^N):
/// truncates when N is below the current precision, zero-fills when above.
PadicScalar lift_zero_fill(const PadicScalar& x, long N);

/// min(N, abs(x)) truncation (exact values just become inexact at N).
PadicScalar truncate(const PadicScalar& x, long N);

}  // namespace padlab
