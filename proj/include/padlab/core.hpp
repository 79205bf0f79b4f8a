#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace padlab {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct PadicError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValuationCapExceeded : PadicError {
    using PadicError::PadicError;
};
struct InexactZeroDivision : PadicError {
    using PadicError::PadicError;
};
struct PrecisionInsufficient : PadicError {
    using PadicError::PadicError;
};
struct DomainError : PadicError {
    using PadicError::PadicError;
};
struct HenselHypothesisFailure : PadicError {
    using PadicError::PadicError;
};
struct NotASquare : PadicError {
    using PadicError::PadicError;
};
struct ContractionViolation : PadicError {
    using PadicError::PadicError;
};
struct PrecisionError : PadicError {
    using PadicError::PadicError;
};
struct LiftPolicyFailure : PadicError {
    using PadicError::PadicError;
};

struct SurjectivityFailure : PadicError {
    long column;
    SurjectivityFailure(const std::string& msg, long col) : PadicError(msg), column(col) {}
};

struct ParseError : PadicError {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos) : PadicError(msg), position(pos) {}
};

// ---------------------------------------------------------------------------
// PrimeContext
// ---------------------------------------------------------------------------

/// A fixed prime p together with the search bound used by routines that
/// hunt for a nonzero digit of a lazily defined value (which otherwise
/// could loop forever on zero).
class PrimeContext {
public:
    explicit PrimeContext(mpz_class p, long val_cap = 1L << 16);

    const mpz_class& prime() const { return p_; }
    long val_cap() const { return val_cap_; }

    bool operator==(const PrimeContext& o) const { return p_ == o.p_; }
    bool operator!=(const PrimeContext& o) const { return !(*this == o); }

    /// p^k for k >= 0.
    mpz_class pow(long k) const;

private:
    mpz_class p_;
    long val_cap_;
};

// ---------------------------------------------------------------------------
// Free digit/valuation helpers
// ---------------------------------------------------------------------------

/// Little-endian base-p digits of n >= 0; empty for 0, last digit nonzero.
std::vector<mpz_class> to_base_p(const mpz_class& n, const PrimeContext& ctx);

/// p-adic valuation of an integer; nullopt encodes val(0) = +infinity.
std::optional<long> valuation(const mpz_class& n, const PrimeContext& ctx);

/// val_p(n!) by Legendre's formula, floor(n/p) + floor(n/p^2) + ...
mpz_class legendre_factorial_valuation(const mpz_class& n, const PrimeContext& ctx);

// ---------------------------------------------------------------------------
// Rational (exact oracle arithmetic)
// ---------------------------------------------------------------------------

/// Reduced fraction with positive denominator. Backed by GMP's mpq.
using Rational = mpq_class;

std::optional<long> valuation(const Rational& q, const PrimeContext& ctx);

/// Canonical residue in [0, p^N) of a rational whose denominator is coprime
/// to p. Throws DomainError if p divides the denominator.
mpz_class rational_mod_pow(const Rational& q, long N, const PrimeContext& ctx);

/// Inverse of a mod p^N (gcd(a, p) = 1 required).
mpz_class inverse_mod_pow(const mpz_class& a, long N, const PrimeContext& ctx);

// ---------------------------------------------------------------------------
// PadicScalar
// ---------------------------------------------------------------------------

/// A p-adic number p^v * s known modulo p^N, i.e. the coset p^v s + O(p^N),
/// or an exact value when no O(-) term is carried.
///
/// Canonical form: inexact values are either the inexact zero (N, v=N, s=0)
/// or satisfy v < N, 0 <= s < p^(N-v), gcd(s, p) = 1. Exact values store
/// gcd(s, p) = 1 (s may be negative), with (v, s) = (0, 0) for the exact zero.
class PadicScalar {
public:
    static PadicScalar exact_integer(mpz_class n, const PrimeContext& ctx);
    static PadicScalar exact_zero(const PrimeContext& ctx);
    /// p^v * s exactly (s need not be a unit; canonicalized).
    static PadicScalar exact_shifted(long v, mpz_class s, const PrimeContext& ctx);
    static PadicScalar inexact_zero(long N, const PrimeContext& ctx);
    /// a + O(p^N) for an integer representative a.
    static PadicScalar from_value(const mpz_class& a, long N, const PrimeContext& ctx);
    /// p^v * s + O(p^N); canonicalizes.
    static PadicScalar from_unit(long v, mpz_class s, long N, const PrimeContext& ctx);
    /// Rational with p-free denominator embedded at precision O(p^N); the
    /// valuation of q may be negative.
    static PadicScalar from_rational(const Rational& q, long N, const PrimeContext& ctx);
    /// Exact rational of the form p^v * (unit numerator / unit denominator)
    /// is representable only when the denominator is +-1 after removing p's;
    /// throws DomainError otherwise.
    static PadicScalar exact_rational(const Rational& q, const PrimeContext& ctx);

    const PrimeContext& context() const { return ctx_; }

    bool is_exact() const { return exact_; }
    bool is_exact_zero() const { return exact_ && s_ == 0; }
    bool is_inexact_zero() const { return !exact_ && s_ == 0; }
    /// True when 0 lies in the represented set.
    bool contains_zero() const { return s_ == 0; }

    /// Absolute precision N. Only meaningful for inexact values.
    long abs_precision() const;
    /// Valuation; nullopt encodes +infinity (exact zero). For the inexact
    /// zero this is N, the smallest valuation of an element of the coset.
    std::optional<long> valuation() const;
    long valuation_or(long fallback) const;
    /// Relative precision N - val for inexact values (0 for inexact zero).
    long rel_precision() const;

    /// Unit part s (0 for zeros).
    const mpz_class& unit_part() const { return s_; }
    long unit_valuation() const { return v_; }

    /// The canonical representative p^v * s as an exact rational.
    Rational to_rational() const;
    /// Integer representative; requires v >= 0 (or zero).
    mpz_class representative() const;

    /// Structural equality of canonical forms.
    bool operator==(const PadicScalar& o) const;
    bool operator!=(const PadicScalar& o) const { return !(*this == o); }

private:
    PadicScalar(bool exact, long v, mpz_class s, long n, PrimeContext ctx)
        : exact_(exact), v_(v), n_(n), s_(std::move(s)), ctx_(std::move(ctx)) {}

    static PadicScalar canonical(bool exact, long v, mpz_class s, long n, const PrimeContext& ctx);

    bool exact_;
    long v_;  // valuation of the unit-part decomposition
    long n_;  // absolute precision (unused when exact_)
    mpz_class s_;
    PrimeContext ctx_;

    friend PadicScalar scalar_add(const PadicScalar&, const PadicScalar&);
    friend PadicScalar scalar_mul(const PadicScalar&, const PadicScalar&);
    friend PadicScalar scalar_neg(const PadicScalar&);
};

/// Exact ring operations; operands must be exact.
PadicScalar scalar_add(const PadicScalar& a, const PadicScalar& b);
PadicScalar scalar_mul(const PadicScalar& a, const PadicScalar& b);
PadicScalar scalar_neg(const PadicScalar& a);

// ---------------------------------------------------------------------------
// Parsing and printing
// ---------------------------------------------------------------------------

enum class PrintStyle { arithmetic, digits };

/// Renders per the literal grammar. Digit style prints rel(x) digits
/// most-significant-first, prefixed with "..." when inexact, with a radix
/// point when v < 0 and a "* p^v" shift marker when v > 0. Exact negative
/// values require a caller-supplied width in digit style.
std::string print_scalar(const PadicScalar& x, PrintStyle style,
                         std::optional<long> negative_width = std::nullopt);

/// Digit positions 0..N-1 (the paper's table rendering); requires an
/// inexact value with v >= 0.
std::string print_digits_padded(const PadicScalar& x);

PadicScalar parse_scalar(const std::string& text, const PrimeContext& ctx);

}  // namespace padlab
