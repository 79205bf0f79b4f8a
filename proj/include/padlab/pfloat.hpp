#pragma once

#include "padlab/core.hpp"

namespace padlab {

/// Floating-point system: significand length N (digits) and exponent range.
struct PFloatSystem {
    PrimeContext ctx;
    long N;
    long e_min;
    long e_max;

    PFloatSystem(PrimeContext c, long n, long emin = -(1L << 30), long emax = 1L << 30)
        : ctx(std::move(c)), N(n), e_min(emin), e_max(emax) {
        if (N < 1) throw DomainError("PFloatSystem: N must be >= 1");
        if (e_min >= e_max) throw DomainError("PFloatSystem: e_min < e_max required");
    }
};

/// A p-adic float is the pair (e, s) encoding p^e * s, with the reserved
/// encodings (e_max, 0) = 0, (e_min-1, 1) = infinity, (e_min-1, 0) = NaN.
/// Finite nonzero values satisfy e_min <= e <= e_max, s in the balanced
/// range around 0 modulo p^N, gcd(s, p) = 1.
struct PFloat {
    long e = 0;
    mpz_class s;

    bool operator==(const PFloat& o) const { return e == o.e && s == o.s; }
    bool operator!=(const PFloat& o) const { return !(*this == o); }
};

bool is_zero(const PFloat& x, const PFloatSystem& sys);
bool is_inf(const PFloat& x, const PFloatSystem& sys);
bool is_nan(const PFloat& x, const PFloatSystem& sys);
bool is_finite_nonzero(const PFloat& x, const PFloatSystem& sys);

PFloat pfloat_zero(const PFloatSystem& sys);
PFloat pfloat_inf(const PFloatSystem& sys);
PFloat pfloat_nan(const PFloatSystem& sys);

/// Balanced representative of a modulo p^N, in (-(p^N-1)/2, (p^N-1)/2]
/// (for p = 2 the upper bound p^N/2 is included, its negative excluded).
mpz_class balanced_mod(const mpz_class& a, long N, const PrimeContext& ctx);

/// The five-case normalization of an arbitrary pair (e, s).
PFloat normalize(long e, mpz_class s, const PFloatSystem& sys);

/// Rounding of an exact rational: the unique float y with
/// |x - y| <= |x| p^-N, or 0 / infinity on under/overflow.
PFloat round_rational(const Rational& x, const PFloatSystem& sys);
/// Rounds the canonical representative of a scalar (exact or inexact).
PFloat round_scalar(const PadicScalar& x, const PFloatSystem& sys);

PFloat fadd(const PFloat& x, const PFloat& y, const PFloatSystem& sys);
PFloat fsub(const PFloat& x, const PFloat& y, const PFloatSystem& sys);
PFloat fmul(const PFloat& x, const PFloat& y, const PFloatSystem& sys);
PFloat fdiv(const PFloat& x, const PFloat& y, const PFloatSystem& sys);
PFloat fneg(const PFloat& x, const PFloatSystem& sys);

/// Finite float as the interval p^e s + O(p^(e+N)).
PadicScalar to_scalar(const PFloat& x, const PFloatSystem& sys);

/// Digit rendering; "Infinity"/"NaN" for the specials.
std::string print_pfloat(const PFloat& x, const PFloatSystem& sys);

}  // namespace padlab
