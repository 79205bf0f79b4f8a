#include "padlab/pfloat.hpp"

namespace padlab {

bool is_zero(const PFloat& x, const PFloatSystem& sys) {
    return x.e == sys.e_max && x.s == 0;
}
bool is_inf(const PFloat& x, const PFloatSystem& sys) {
    return x.e == sys.e_min - 1 && x.s == 1;
}
bool is_nan(const PFloat& x, const PFloatSystem& sys) {
    return x.e == sys.e_min - 1 && x.s == 0;
}
bool is_finite_nonzero(const PFloat& x, const PFloatSystem& sys) {
    return !is_zero(x, sys) && !is_inf(x, sys) && !is_nan(x, sys);
}

PFloat pfloat_zero(const PFloatSystem& sys) { return {sys.e_max, 0}; }
PFloat pfloat_inf(const PFloatSystem& sys) { return {sys.e_min - 1, 1}; }
PFloat pfloat_nan(const PFloatSystem& sys) { return {sys.e_min - 1, 0}; }

mpz_class balanced_mod(const mpz_class& a, long N, const PrimeContext& ctx) {
    mpz_class m = ctx.pow(N);
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    if (2 * r > m) r -= m;
    return r;
}

PFloat normalize(long e, mpz_class s, const PFloatSystem& sys) {
    if (e < sys.e_min) return s == 0 ? pfloat_nan(sys) : pfloat_inf(sys);
    if (e > sys.e_max) return pfloat_zero(sys);
    if (s == 0) return pfloat_zero(sys);
    long k = 0;
    while (mpz_divisible_p(s.get_mpz_t(), sys.ctx.prime().get_mpz_t())) {
        s /= sys.ctx.prime();
        ++k;
    }
    mpz_class r = balanced_mod(s, sys.N, sys.ctx);
    if (k == 0 && r == s && sys.e_min <= e && e <= sys.e_max) return {e, r};
    return normalize(e + k, std::move(r), sys);
}

PFloat round_rational(const Rational& x, const PFloatSystem& sys) {
    if (x == 0) return pfloat_zero(sys);
    long v = *valuation(x, sys.ctx);
    if (v < sys.e_min) return pfloat_inf(sys);
    if (v > sys.e_max) return pfloat_zero(sys);
    Rational unit = x;
    if (v >= 0) {
        unit /= Rational(sys.ctx.pow(v));
    } else {
        unit *= Rational(sys.ctx.pow(-v));
    }
    mpz_class s = balanced_mod(rational_mod_pow(unit, sys.N, sys.ctx), sys.N, sys.ctx);
    return {v, s};
}

PFloat round_scalar(const PadicScalar& x, const PFloatSystem& sys) {
    return round_rational(x.to_rational(), sys);
}

namespace {

// fadd on finite nonzero operands
PFloat fadd_finite(const PFloat& x, const PFloat& y, const PFloatSystem& sys) {
    const PrimeContext& ctx = sys.ctx;
    if (x.e != y.e) {
        const PFloat& lo = x.e < y.e ? x : y;
        const PFloat& hi = x.e < y.e ? y : x;
        mpz_class s = lo.s + hi.s * ctx.pow(hi.e - lo.e);
        return {lo.e, balanced_mod(s, sys.N, ctx)};
    }
    mpz_class sum = x.s + y.s;
    if (sum == 0) return pfloat_zero(sys);
    long v = *valuation(sum, ctx);
    if (v > sys.e_max - x.e) return pfloat_zero(sys);
    mpz_class t = sum / ctx.pow(v);
    return {x.e + v, balanced_mod(t, sys.N, ctx)};
}

}  // namespace

PFloat fadd(const PFloat& x, const PFloat& y, const PFloatSystem& sys) {
    if (is_nan(x, sys) || is_nan(y, sys)) return pfloat_nan(sys);
    if (is_inf(x, sys) || is_inf(y, sys)) return pfloat_inf(sys);
    if (is_zero(x, sys)) return y;
    if (is_zero(y, sys)) return x;
    return fadd_finite(x, y, sys);
}

PFloat fneg(const PFloat& x, const PFloatSystem& sys) {
    if (!is_finite_nonzero(x, sys)) return x;
    return {x.e, balanced_mod(-x.s, sys.N, sys.ctx)};
}

PFloat fsub(const PFloat& x, const PFloat& y, const PFloatSystem& sys) {
    return fadd(x, fneg(y, sys), sys);
}

PFloat fmul(const PFloat& x, const PFloat& y, const PFloatSystem& sys) {
    if (is_nan(x, sys) || is_nan(y, sys)) return pfloat_nan(sys);
    bool xi = is_inf(x, sys), yi = is_inf(y, sys);
    bool xz = is_zero(x, sys), yz = is_zero(y, sys);
    if (xi || yi) {
        if (xz || yz) return pfloat_nan(sys);  // 0 * inf
        return pfloat_inf(sys);
    }
    if (xz || yz) return pfloat_zero(sys);
    long e = x.e + y.e;
    if (e > sys.e_max) return pfloat_zero(sys);
    if (e < sys.e_min) return pfloat_inf(sys);
    return {e, balanced_mod(x.s * y.s, sys.N, sys.ctx)};
}

PFloat fdiv(const PFloat& x, const PFloat& y, const PFloatSystem& sys) {
    if (is_nan(x, sys) || is_nan(y, sys)) return pfloat_nan(sys);
    bool xi = is_inf(x, sys), yi = is_inf(y, sys);
    bool xz = is_zero(x, sys), yz = is_zero(y, sys);
    if (xi) return yi ? pfloat_nan(sys) : pfloat_inf(sys);
    if (yi) return pfloat_zero(sys);
    if (yz) return xz ? pfloat_nan(sys) : pfloat_inf(sys);
    if (xz) return pfloat_zero(sys);
    long e = x.e - y.e;
    if (e < sys.e_min) return pfloat_inf(sys);
    if (e > sys.e_max) return pfloat_zero(sys);
    mpz_class inv = inverse_mod_pow(y.s, sys.N, sys.ctx);
    return {e, balanced_mod(x.s * inv, sys.N, sys.ctx)};
}

PadicScalar to_scalar(const PFloat& x, const PFloatSystem& sys) {
    if (is_zero(x, sys)) return PadicScalar::inexact_zero(sys.e_max, sys.ctx);
    if (!is_finite_nonzero(x, sys)) throw DomainError("to_scalar: special value");
    return PadicScalar::from_unit(x.e, x.s, x.e + sys.N, sys.ctx);
}

std::string print_pfloat(const PFloat& x, const PFloatSystem& sys) {
    if (is_nan(x, sys)) return "NaN";
    if (is_inf(x, sys)) return "Infinity";
    if (is_zero(x, sys)) return "0";
    return print_scalar(to_scalar(x, sys), PrintStyle::digits);
}

}  // namespace padlab
