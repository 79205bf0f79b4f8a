#include "padlab/zealous.hpp"

#include <algorithm>

namespace padlab {

namespace {

void check_ctx(const PadicScalar& a, const PadicScalar& b) {
    if (a.context() != b.context()) throw DomainError("zealous: prime mismatch");
}

// coerce an exact operand to the partner's precision plus headroom
PadicScalar coerce(const PadicScalar& x, long partner_abs) {
    long n = partner_abs + kExactCoercionHeadroom;
    long v = x.valuation_or(n);
    if (v > n) n = v + kExactCoercionHeadroom;
    return PadicScalar::from_unit(x.unit_valuation(), x.unit_part(), n, x.context());
}

PadicScalar add_like(const PadicScalar& a, const PadicScalar& b, bool subtract) {
    check_ctx(a, b);
    if (a.is_exact() && b.is_exact()) {
        return subtract ? scalar_add(a, scalar_neg(b)) : scalar_add(a, b);
    }
    PadicScalar xa = a.is_exact() ? coerce(a, b.abs_precision()) : a;
    PadicScalar yb = b.is_exact() ? coerce(b, a.abs_precision()) : b;
    long n = std::min(xa.abs_precision(), yb.abs_precision());
    long w = std::min({xa.unit_valuation(), yb.unit_valuation(), n});
    const PrimeContext& ctx = a.context();
    mpz_class lhs = xa.unit_part() * ctx.pow(xa.unit_valuation() - w);
    mpz_class rhs = yb.unit_part() * ctx.pow(yb.unit_valuation() - w);
    mpz_class sum = subtract ? lhs - rhs : lhs + rhs;
    return PadicScalar::from_unit(w, std::move(sum), n, ctx);
}

}  // namespace

PadicScalar zadd(const PadicScalar& a, const PadicScalar& b) { return add_like(a, b, false); }
PadicScalar zsub(const PadicScalar& a, const PadicScalar& b) { return add_like(a, b, true); }

PadicScalar zneg(const PadicScalar& a) {
    if (a.is_exact()) return scalar_neg(a);
    return PadicScalar::from_unit(a.unit_valuation(), -a.unit_part(), a.abs_precision(),
                                  a.context());
}

PadicScalar zmul(const PadicScalar& a, const PadicScalar& b) {
    check_ctx(a, b);
    if (a.is_exact() && b.is_exact()) return scalar_mul(a, b);
    PadicScalar x = a.is_exact() ? coerce(a, b.abs_precision()) : a;
    PadicScalar y = b.is_exact() ? coerce(b, a.abs_precision()) : b;
    long v = x.valuation_or(x.abs_precision());
    long w = y.valuation_or(y.abs_precision());
    long n = std::min(v + y.abs_precision(), x.abs_precision() + w);
    if (x.contains_zero() || y.contains_zero()) return PadicScalar::inexact_zero(n, a.context());
    long uv = x.unit_valuation() + y.unit_valuation();
    return PadicScalar::from_unit(uv, x.unit_part() * y.unit_part(), n, a.context());
}

PadicScalar zdiv(const PadicScalar& a, const PadicScalar& b) {
    check_ctx(a, b);
    const PrimeContext& ctx = a.context();
    if (b.is_exact_zero()) throw DomainError("zdiv: division by exact zero");
    if (b.contains_zero()) {
        throw InexactZeroDivision("zdiv: divisor is indistinguishable from 0");
    }
    if (a.is_exact() && b.is_exact()) {
        // representable only when the unit parts divide exactly
        mpz_class q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.unit_part().get_mpz_t(),
                    b.unit_part().get_mpz_t());
        if (r != 0) {
            throw DomainError("zdiv: exact quotient is not representable; truncate an operand");
        }
        return PadicScalar::exact_shifted(a.unit_valuation() - b.unit_valuation(), std::move(q),
                                          ctx);
    }
    PadicScalar x = a.is_exact() ? coerce(a, b.abs_precision()) : a;
    PadicScalar y = b.is_exact() ? coerce(b, a.abs_precision()) : b;
    long v = x.valuation_or(x.abs_precision());
    long w = y.unit_valuation();
    long n = std::min(v + y.abs_precision() - 2 * w, x.abs_precision() - w);
    if (x.contains_zero()) return PadicScalar::inexact_zero(n, ctx);
    long uv = x.unit_valuation() - w;
    long rel = n - uv;
    if (rel <= 0) return PadicScalar::inexact_zero(n, ctx);
    mpz_class inv = inverse_mod_pow(y.unit_part(), rel, ctx);
    return PadicScalar::from_unit(uv, x.unit_part() * inv, n, ctx);
}

PadicScalar zpow_p(const PadicScalar& a) {
    if (a.is_exact()) throw DomainError("zpow_p: operand must be inexact");
    if (a.valuation_or(0) != 0 || a.rel_precision() < 1) {
        throw DomainError("zpow_p: operand must be a unit with rel >= 1");
    }
    const PrimeContext& ctx = a.context();
    long n = a.abs_precision() + 1;
    mpz_class m = ctx.pow(n);
    mpz_class r;
    mpz_powm(r.get_mpz_t(), a.unit_part().get_mpz_t(), ctx.prime().get_mpz_t(), m.get_mpz_t());
    return PadicScalar::from_value(r, n, ctx);
}

PadicScalar lift_zero_fill(const PadicScalar& x, long N) {
    const PrimeContext& ctx = x.context();
    if (x.contains_zero()) return PadicScalar::inexact_zero(N, ctx);
    if (x.unit_valuation() >= 0) {
        return PadicScalar::from_value(x.representative(), N, ctx);
    }
    return PadicScalar::from_unit(x.unit_valuation(), x.unit_part(), N, ctx);
}

PadicScalar truncate(const PadicScalar& x, long N) {
    if (!x.is_exact() && x.abs_precision() <= N) return x;
    return lift_zero_fill(x, N);
}

}  // namespace padlab
