#include "padlab/newton.hpp"

#include <algorithm>

namespace padlab {

PPolynomial::PPolynomial(std::vector<PadicScalar> coeffs, PrimeContext ctx)
    : coeffs_(std::move(coeffs)), ctx_(std::move(ctx)) {
    if (coeffs_.empty()) coeffs_.push_back(PadicScalar::exact_zero(ctx_));
    for (const auto& c : coeffs_) {
        if (c.context() != ctx_) throw DomainError("PPolynomial: prime mismatch");
    }
}

const PadicScalar& PPolynomial::coeff(long k) const {
    if (k < 0 || k > degree()) throw DomainError("PPolynomial::coeff: index out of range");
    return coeffs_[static_cast<std::size_t>(k)];
}

PPolynomial PPolynomial::derivative() const {
    std::vector<PadicScalar> out;
    for (long k = 1; k <= degree(); ++k) {
        out.push_back(zmul(PadicScalar::exact_integer(k, ctx_), coeffs_[k]));
    }
    if (out.empty()) out.push_back(PadicScalar::exact_zero(ctx_));
    return PPolynomial(std::move(out), ctx_);
}

PadicScalar PPolynomial::evaluate(const PadicScalar& x) const {
    PadicScalar acc = coeffs_.back();
    for (long k = degree() - 1; k >= 0; --k) {
        acc = zadd(zmul(acc, x), coeffs_[k]);
    }
    return acc;
}

namespace {

// minimum absolute precision among inexact coefficients; nullopt if all exact
std::optional<long> min_coeff_precision(const PPolynomial& f) {
    std::optional<long> m;
    for (const auto& c : f.coeffs()) {
        if (!c.is_exact()) m = m ? std::min(*m, c.abs_precision()) : c.abs_precision();
    }
    return m;
}

PPolynomial coerce_poly(const PPolynomial& f, long N) {
    std::vector<PadicScalar> out;
    for (const auto& c : f.coeffs()) out.push_back(lift_zero_fill(c, N));
    return PPolynomial(std::move(out), f.context());
}

}  // namespace

PadicScalar hensel_lift(const PPolynomial& f, const PadicScalar& a, long target_prec) {
    const PrimeContext& ctx = f.context();
    if (target_prec < 1) throw DomainError("hensel_lift: target precision must be >= 1");
    for (const auto& c : f.coeffs()) {
        if (c.valuation_or(0) < 0) throw DomainError("hensel_lift: coefficients must be in Zp");
    }
    if (a.valuation_or(0) < 0) throw DomainError("hensel_lift: seed must be in Zp");

    // certify |f(a)| < |f'(a)|^2 at the available precision
    long probe = target_prec + 8;
    PPolynomial fp = coerce_poly(f, probe);
    PPolynomial fpd = fp.derivative();
    PadicScalar a0 = lift_zero_fill(a, probe);
    PadicScalar fa = fp.evaluate(a0);
    PadicScalar fda = fpd.evaluate(a0);
    if (fda.contains_zero()) {
        throw HenselHypothesisFailure("hensel_lift: f'(a) is indistinguishable from 0");
    }
    long vfd = *fda.valuation();
    long vfa = fa.valuation_or(fa.abs_precision());  // lower bound when inexact zero
    if (vfa <= 2 * vfd) {
        throw HenselHypothesisFailure("hensel_lift: |f(a)| < |f'(a)|^2 cannot be certified");
    }

    if (auto cap = min_coeff_precision(f)) {
        if (*cap - vfd < target_prec) {
            throw PrecisionInsufficient("hensel_lift: coefficient precision caps the output");
        }
    }

    // working precision: enough headroom for the division by f'(x)
    long work = target_prec + 2 * vfd + 4;
    PPolynomial fw = coerce_poly(f, work);
    PPolynomial fwd = fw.derivative();

    // certified correct digits of x_i: vfd + 2^i (vfa - 2 vfd)
    long gap = vfa - 2 * vfd;
    PadicScalar x = lift_zero_fill(a, work);
    long iter = 0;
    long cert = vfd + gap;
    while (cert < target_prec) {
        PadicScalar fx = fw.evaluate(x);
        PadicScalar fdx = fwd.evaluate(x);
        if (fx.contains_zero()) {
            // residual already below working precision; x is as good as computable
            break;
        }
        PadicScalar q = zdiv(fx, fdx);
        x = zsub(x, q);
        ++iter;
        if (iter > 64) throw PadicError("hensel_lift: failed to converge");
        cert = vfd + (gap << std::min(iter, 40L));
        x = lift_zero_fill(x, std::min(cert, work));
        x = lift_zero_fill(x, work);
    }
    return truncate(x, target_prec);
}

PadicScalar newton_inverse(const PadicScalar& c, long target_prec) {
    const PrimeContext& ctx = c.context();
    if (c.valuation_or(0) != 0) throw DomainError("newton_inverse: val(c) must be 0");
    if (!c.is_exact() && c.abs_precision() < target_prec) {
        throw PrecisionInsufficient("newton_inverse: input precision below target");
    }
    mpz_class cr = c.is_exact() ? c.representative()
                                : lift_zero_fill(c, target_prec).representative();
    mpz_class x = inverse_mod_pow(cr, 1, ctx);
    long k = 0;  // correct digits = 2^k
    while ((1L << k) < target_prec) {
        long next = std::min(2 * (1L << k), target_prec);
        mpz_class m = ctx.pow(next);
        mpz_class t = 2 * x - cr * x * x;
        mpz_fdiv_r(x.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t());
        ++k;
    }
    mpz_class m = ctx.pow(target_prec);
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
    return PadicScalar::from_value(r, target_prec, ctx);
}

LazyNumber newton_inverse(const LazyNumber& c) {
    return lazy_div(LazyNumber::constant(1, c.context()), c);
}

std::vector<std::vector<PadicScalar>> newton_matrix_inverse(
    const std::vector<std::vector<PadicScalar>>& C, long target_prec) {
    if (C.empty()) throw DomainError("newton_matrix_inverse: empty matrix");
    const std::size_t d = C.size();
    const PrimeContext& ctx = C[0][0].context();
    const mpz_class& p = ctx.prime();

    std::vector<std::vector<mpz_class>> M(d, std::vector<mpz_class>(d));
    for (std::size_t i = 0; i < d; ++i) {
        if (C[i].size() != d) throw DomainError("newton_matrix_inverse: not square");
        for (std::size_t j = 0; j < d; ++j) {
            if (C[i][j].valuation_or(0) < 0) {
                throw DomainError("newton_matrix_inverse: entries must be in Zp");
            }
            if (!C[i][j].is_exact() && C[i][j].abs_precision() < target_prec) {
                throw PrecisionInsufficient("newton_matrix_inverse: input precision below target");
            }
            M[i][j] = C[i][j].representative();
        }
    }

    // seed: inverse of C mod p by Gaussian elimination over F_p
    std::vector<std::vector<mpz_class>> A(d, std::vector<mpz_class>(d, 0));
    {
        std::vector<std::vector<mpz_class>> W(d, std::vector<mpz_class>(2 * d, 0));
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) W[i][j] = M[i][j] % p;
            W[i][d + i] = 1;
        }
        for (std::size_t k = 0; k < d; ++k) {
            std::size_t piv = k;
            while (piv < d && W[piv][k] % p == 0) ++piv;
            if (piv == d) throw DomainError("newton_matrix_inverse: C mod p is singular");
            std::swap(W[k], W[piv]);
            mpz_class inv = inverse_mod_pow(W[k][k], 1, ctx);
            for (auto& e : W[k]) e = e * inv % p;
            for (std::size_t i = 0; i < d; ++i) {
                if (i == k || W[i][k] == 0) continue;
                mpz_class f = W[i][k];
                for (std::size_t j = 0; j < 2 * d; ++j) {
                    mpz_class e = W[i][j] - f * W[k][j];
                    mpz_fdiv_r(e.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
                    W[i][j] = e;
                }
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) A[i][j] = W[i][d + j];
        }
    }

    auto matmul_mod = [&](const std::vector<std::vector<mpz_class>>& X,
                          const std::vector<std::vector<mpz_class>>& Y, const mpz_class& m) {
        std::vector<std::vector<mpz_class>> R(d, std::vector<mpz_class>(d, 0));
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                if (X[i][k] == 0) continue;
                for (std::size_t j = 0; j < d; ++j) R[i][j] += X[i][k] * Y[k][j];
            }
        }
        for (auto& row : R) {
            for (auto& e : row) mpz_fdiv_r(e.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
        }
        return R;
    };

    long k = 0;
    while ((1L << k) < target_prec) {
        long next = std::min(2 * (1L << k), target_prec);
        mpz_class m = ctx.pow(next);
        // X <- 2X - XCX (note the order)
        auto XC = matmul_mod(A, M, m);
        auto XCX = matmul_mod(XC, A, m);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                mpz_class e = 2 * A[i][j] - XCX[i][j];
                mpz_fdiv_r(e.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
                A[i][j] = e;
            }
        }
        ++k;
    }

    std::vector<std::vector<PadicScalar>> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            out[i].push_back(PadicScalar::from_value(A[i][j], target_prec, ctx));
        }
    }
    return out;
}

mpz_class sqrt_mod_p(const mpz_class& u, const PrimeContext& ctx) {
    const mpz_class& p = ctx.prime();
    if (p == 2) throw DomainError("sqrt_mod_p: p must be odd");
    mpz_class a;
    mpz_fdiv_r(a.get_mpz_t(), u.get_mpz_t(), p.get_mpz_t());
    if (a == 0) return 0;
    if (p < 65536) {
        for (mpz_class r = 1; r < p; ++r) {
            if (r * r % p == a) return r;
        }
        throw NotASquare("sqrt_mod_p: not a quadratic residue");
    }
    // Tonelli-Shanks
    if (mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) != 1) {
        throw NotASquare("sqrt_mod_p: not a quadratic residue");
    }
    mpz_class q = p - 1;
    unsigned long s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q /= 2;
        ++s;
    }
    mpz_class z = 2;
    while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
    mpz_class m(s), c, t, r, e;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    while (t != 1) {
        mpz_class tt = t;
        unsigned long i = 0;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
        }
        mpz_class b = c;
        for (unsigned long j = 0; j + i + 1 < mpz_get_ui(m.get_mpz_t()); ++j) b = b * b % p;
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

namespace {

PadicScalar sqrt_unit(const PadicScalar& cu, SqrtVariant variant) {
    const PrimeContext& ctx = cu.context();
    const bool two = ctx.prime() == 2;
    const long N = cu.abs_precision();  // relative precision of the unit input
    // seed
    mpz_class seed;
    if (two) {
        if (cu.rel_precision() < 3) {
            throw PrecisionInsufficient("padic_sqrt: need at least 3 digits at p = 2");
        }
        if (cu.representative() % 8 != 1) {
            throw NotASquare("padic_sqrt: unit not congruent to 1 mod 8");
        }
        seed = 1;
    } else {
        seed = sqrt_mod_p(cu.representative(), ctx);
        if (seed == 0) throw NotASquare("padic_sqrt: unit reduces to 0 mod p");
    }

    auto cert_digits = [&](long i) -> long {
        // correct digits of x_i: 2^i + 1 at p = 2, else 2^i
        long e = i >= 40 ? (1L << 40) : (1L << i);
        return two ? e + 1 : e;
    };

    if (variant == SqrtVariant::naive_zealous) {
        PadicScalar x = PadicScalar::exact_integer(seed, ctx);
        PadicScalar two_exact = PadicScalar::exact_integer(2, ctx);
        long i = 0;
        while (true) {
            PadicScalar next = zdiv(zadd(x, zdiv(cu, x)), two_exact);
            ++i;
            x = next;
            if (cert_digits(i) >= x.abs_precision()) return x;
        }
    }

    // zero-lift: zero-fill the uncertified digits after every iteration
    PadicScalar x = PadicScalar::exact_integer(seed, ctx);
    PadicScalar two_exact = PadicScalar::exact_integer(2, ctx);
    long i = 0;
    while (true) {
        PadicScalar next = zdiv(zadd(x, zdiv(cu, x)), two_exact);
        ++i;
        long cert = cert_digits(i);
        if (cert >= next.abs_precision()) return next;
        x = PadicScalar::exact_integer(lift_zero_fill(next, cert).representative(), ctx);
    }
}

}  // namespace

PadicScalar padic_sqrt(const PadicScalar& c, SqrtVariant variant) {
    const PrimeContext& ctx = c.context();
    if (c.is_exact_zero()) return c;
    if (c.is_exact()) {
        // exact inputs are supported only for perfect squares
        if (c.unit_valuation() % 2 != 0 || c.unit_part() < 0 ||
            mpz_perfect_square_p(c.unit_part().get_mpz_t()) == 0) {
            throw DomainError("padic_sqrt: exact input is not a perfect square; truncate first");
        }
        mpz_class r;
        mpz_sqrt(r.get_mpz_t(), c.unit_part().get_mpz_t());
        return PadicScalar::exact_shifted(c.unit_valuation() / 2, r, ctx);
    }
    if (c.contains_zero()) {
        throw PrecisionInsufficient("padic_sqrt: value indistinguishable from 0");
    }
    long v = *c.valuation();
    if (v % 2 != 0) throw NotASquare("padic_sqrt: odd valuation");
    PadicScalar unit = PadicScalar::from_unit(0, c.unit_part(), c.abs_precision() - v, ctx);
    PadicScalar root = sqrt_unit(unit, variant);
    if (v == 0) return root;
    return zmul(PadicScalar::exact_shifted(v / 2, 1, ctx), root);
}

}  // namespace padlab
