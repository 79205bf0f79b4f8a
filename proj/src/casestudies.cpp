#include "padlab/casestudies.hpp"

#include <algorithm>
#include <sstream>

namespace padlab {

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

namespace fixtures {

namespace {

PMatrix matrix_from(const long (&rows)[4][4], const PrimeContext& ctx, long prec) {
    std::vector<PadicScalar> es;
    for (auto& r : rows) {
        for (long e : r) es.push_back(PadicScalar::from_value(e, prec, ctx));
    }
    return PMatrix::from_entries(4, 4, std::move(es));
}

PPolynomial poly_from(const std::vector<long>& asc, const PrimeContext& ctx, long prec,
                      bool monic) {
    std::vector<PadicScalar> cs;
    for (long c : asc) cs.push_back(PadicScalar::from_value(c, prec, ctx));
    if (monic) cs.push_back(PadicScalar::exact_integer(1, ctx));
    return PPolynomial(std::move(cs), ctx);
}

}  // namespace

PMatrix matrix_m(const PrimeContext& p2, long prec) {
    static const long rows[4][4] = {{368, 224, 712, 196},
                                    {857, 839, 458, 373},
                                    {483, 741, 166, 1015},
                                    {61, 883, 210, 609}};
    return matrix_from(rows, p2, prec);
}

PPolynomial bezout_p(const PrimeContext& p2, long prec) {
    return poly_from({186, 588, 243, 895}, p2, prec, true);
}

PPolynomial bezout_q(const PrimeContext& p2, long prec) {
    return poly_from({839, 272, 463, 331}, p2, prec, true);
}

PPolynomial poly_deg8(const PrimeContext& p2, long prec) {
    return poly_from({94, 218, 663, 237, 964, 653, 524, 337, 462}, p2, prec, false);
}

PPolynomial poly_deg19(const PrimeContext& p2, long prec) {
    return poly_from({126, 32, 530, 257, 787, 495, 336, 273, 1004, 938, 48, 260, 727, 505,
                      430, 231, 602, 206, 835, 361},
                     p2, prec, false);
}

PadicScalar sqrt_input(const PrimeContext& p2) {
    mpz_class c = 1;
    for (long e : {3L, 4L, 5L, 10L, 13L, 16L, 17L, 18L, 19L}) c += mpz_class(1) << e;
    return PadicScalar::from_value(c, 20, p2);
}

}  // namespace fixtures

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string ExperimentReport::to_tsv() const {
    std::ostringstream os;
    os << "id\tbackend\tvalue\tprecision\treference\tagreeing_digits\n";
    for (const auto& r : rows) {
        os << r.id << '\t' << r.backend << '\t' << r.value << '\t' << r.precision << '\t'
           << r.reference << '\t';
        if (r.agreeing_digits < 0) {
            os << "-";
        } else {
            os << r.agreeing_digits;
        }
        os << '\n';
    }
    return os.str();
}

long digit_agreement(const Rational& reference, const Rational& computed, long limit,
                     const PrimeContext& ctx) {
    if (reference == 0) return computed == 0 ? limit : 0;
    long vref = *valuation(reference, ctx);
    Rational diff = computed - reference;
    if (diff == 0) return limit;
    long vdiff = *valuation(diff, ctx);
    if (vdiff <= vref) return 0;  // wrong valuation or immediate mismatch
    return std::min(limit, vdiff - vref);
}

// ---------------------------------------------------------------------------
// Backend adapters and the division-free determinant
// ---------------------------------------------------------------------------

namespace {

struct ZOps {
    using V = PadicScalar;
    PrimeContext ctx;
    V add(const V& a, const V& b) const { return zadd(a, b); }
    V sub(const V& a, const V& b) const { return zsub(a, b); }
    V mul(const V& a, const V& b) const { return zmul(a, b); }
    V div(const V& a, const V& b) const { return zdiv(a, b); }
    V neg(const V& a) const { return zneg(a); }
    V zero() const { return PadicScalar::exact_zero(ctx); }
    V one() const { return PadicScalar::exact_integer(1, ctx); }
    V from_scalar(const PadicScalar& x) const { return x; }
};

struct FOps {
    using V = PFloat;
    PFloatSystem sys;
    V add(const V& a, const V& b) const { return fadd(a, b, sys); }
    V sub(const V& a, const V& b) const { return fsub(a, b, sys); }
    V mul(const V& a, const V& b) const { return fmul(a, b, sys); }
    V div(const V& a, const V& b) const { return fdiv(a, b, sys); }
    V neg(const V& a) const { return fneg(a, sys); }
    V zero() const { return pfloat_zero(sys); }
    V one() const { return normalize(0, 1, sys); }
    V from_scalar(const PadicScalar& x) const { return round_scalar(x, sys); }
};

struct QOps {
    using V = Rational;
    PrimeContext ctx;
    V add(const V& a, const V& b) const { return a + b; }
    V sub(const V& a, const V& b) const { return a - b; }
    V mul(const V& a, const V& b) const { return a * b; }
    V div(const V& a, const V& b) const { return a / b; }
    V neg(const V& a) const { return -a; }
    V zero() const { return Rational(0); }
    V one() const { return Rational(1); }
    V from_scalar(const PadicScalar& x) const { return x.to_rational(); }
};

template <class Ops>
using MatrixOf = std::vector<std::vector<typename Ops::V>>;

template <class Ops>
MatrixOf<Ops> convert_matrix(const PMatrix& m, const Ops& ops) {
    MatrixOf<Ops> out(m.rows(), std::vector<typename Ops::V>(m.cols(), ops.zero()));
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) out[i][j] = ops.from_scalar(m.at(i, j));
    }
    return out;
}

// Bird's division-free determinant: X_1 = A, X_{k+1} = mu(X_k) A where mu
// replaces the diagonal entry (i,i) by minus the sum of the trailing
// diagonal entries of X_k; det A = (-1)^{d-1} (X_d)_{1,1}.
template <class Ops>
typename Ops::V bird_det(const MatrixOf<Ops>& a, const Ops& ops) {
    const long d = static_cast<long>(a.size());
    if (d == 1) return a[0][0];
    MatrixOf<Ops> x = a;
    for (long step = 1; step < d; ++step) {
        // y = mu(x)
        MatrixOf<Ops> y = x;
        typename Ops::V tail = ops.zero();
        for (long i = d - 1; i >= 0; --i) {
            y[i][i] = ops.neg(tail);
            tail = ops.add(tail, x[i][i]);
        }
        // x = y * a
        MatrixOf<Ops> z(d, std::vector<typename Ops::V>(d, ops.zero()));
        for (long i = 0; i < d; ++i) {
            for (long k = 0; k < d; ++k) {
                for (long j = 0; j < d; ++j) {
                    z[i][j] = ops.add(z[i][j], ops.mul(y[i][k], a[k][j]));
                }
            }
        }
        x = std::move(z);
    }
    typename Ops::V r = x[0][0];
    if (d % 2 == 0) r = ops.neg(r);
    return r;
}

// dense polynomial ring over a backend, ascending coefficients
template <class Ops>
struct PolyOps {
    using V = std::vector<typename Ops::V>;
    Ops inner;
    V add(const V& a, const V& b) const {
        V r(std::max(a.size(), b.size()), inner.zero());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = inner.add(r[i], a[i]);
        for (std::size_t i = 0; i < b.size(); ++i) r[i] = inner.add(r[i], b[i]);
        return r;
    }
    V sub(const V& a, const V& b) const { return add(a, neg(b)); }
    V mul(const V& a, const V& b) const {
        V r(a.size() + b.size() - 1, inner.zero());
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = 0; j < b.size(); ++j) {
                r[i + j] = inner.add(r[i + j], inner.mul(a[i], b[j]));
            }
        }
        return r;
    }
    V neg(const V& a) const {
        V r = a;
        for (auto& c : r) c = inner.neg(c);
        return r;
    }
    V zero() const { return V{inner.zero()}; }
    V one() const { return V{inner.one()}; }
};

// characteristic polynomial det(XI - M) via the division-free determinant
// over the polynomial ring; returns d+1 ascending coefficients
template <class Ops>
std::vector<typename Ops::V> charpoly_generic(const PMatrix& m, const Ops& ops) {
    const long d = m.rows();
    PolyOps<Ops> pops{ops};
    MatrixOf<PolyOps<Ops>> a(d, std::vector<typename PolyOps<Ops>::V>(d));
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            typename PolyOps<Ops>::V cell{ops.neg(ops.from_scalar(m.at(i, j)))};
            if (i == j) cell.push_back(ops.one());
            a[i][j] = cell;
        }
    }
    auto det = bird_det(a, pops);
    det.resize(d + 1, ops.zero());
    return det;
}

}  // namespace

PadicScalar det_division_free(const PMatrix& m) {
    ZOps ops{m.context()};
    return bird_det(convert_matrix(m, ops), ops);
}

PFloat det_division_free_pfloat(const PMatrix& m, const PFloatSystem& sys) {
    FOps ops{sys};
    return bird_det(convert_matrix(m, ops), ops);
}

Rational det_exact(const PMatrix& m) {
    QOps ops{m.context()};
    return bird_det(convert_matrix(m, ops), ops);
}

PadicScalar det_optimal(const PMatrix& m) {
    SmithResult s = smith_diagonalize(m);
    PadicScalar prod = s.diag[0];
    for (std::size_t i = 1; i < s.diag.size(); ++i) prod = zmul(prod, s.diag[i]);
    return s.det_sign < 0 ? zneg(prod) : prod;
}

// ---------------------------------------------------------------------------
// Jacobians of det and charpoly
// ---------------------------------------------------------------------------

namespace {

PMatrix lift_matrix(const PMatrix& m, long prec) {
    PMatrix out = m;
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) out.at(i, j) = lift_zero_fill(out.at(i, j), prec);
    }
    return out;
}

PMatrix erase_row_col(const PMatrix& m, long row, long col) {
    std::vector<PadicScalar> es;
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            if (i != row && j != col) es.push_back(m.at(i, j));
        }
    }
    return PMatrix::from_entries(m.rows() - 1, m.cols() - 1, std::move(es));
}

}  // namespace

PMatrix det_jacobian(const PMatrix& m, long internal_prec) {
    const long d = m.rows();
    long base = 0;
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            if (!m.at(i, j).is_exact()) base = std::max(base, m.at(i, j).abs_precision());
        }
    }
    PMatrix lifted = lift_matrix(m, base + internal_prec);
    PMatrix out(d * d, 1, m.context());
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            PadicScalar c = det_division_free(erase_row_col(lifted, i, j));
            if ((i + j) % 2) c = zneg(c);
            out.at(i * d + j, 0) = c;
        }
    }
    return out;
}

PMatrix charpoly_jacobian(const PMatrix& m, long internal_prec) {
    const long d = m.rows();
    long base = 0;
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            if (!m.at(i, j).is_exact()) base = std::max(base, m.at(i, j).abs_precision());
        }
    }
    PMatrix lifted = lift_matrix(m, base + internal_prec);
    PMatrix out(d * d, d, m.context());
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            ZOps ops{m.context()};
            auto coeffs = charpoly_generic(erase_row_col(lifted, i, j), ops);
            for (long k = 0; k < d; ++k) {
                PadicScalar c = coeffs[k];
                if ((i + j) % 2) c = zneg(c);
                out.at(i * d + j, k) = c;
            }
        }
    }
    return out;
}

PPolynomial charpoly(const PMatrix& m) {
    ZOps ops{m.context()};
    return PPolynomial(charpoly_generic(m, ops), m.context());
}

std::vector<PFloat> charpoly_pfloat(const PMatrix& m, const PFloatSystem& sys) {
    FOps ops{sys};
    return charpoly_generic(m, ops);
}

std::vector<Rational> charpoly_exact(const PMatrix& m) {
    QOps ops{m.context()};
    return charpoly_generic(m, ops);
}

// ---------------------------------------------------------------------------
// LU factorization
// ---------------------------------------------------------------------------

namespace {

template <class Ops>
std::pair<MatrixOf<Ops>, MatrixOf<Ops>> lu_generic(const PMatrix& m, const Ops& ops) {
    const long d = m.rows();
    MatrixOf<Ops> w = convert_matrix(m, ops);
    MatrixOf<Ops> u(d, std::vector<typename Ops::V>(d, ops.zero()));
    for (long i = 0; i < d; ++i) u[i][i] = ops.one();
    for (long k = 0; k < d; ++k) {
        // scale column k so the pivot becomes 1; accumulate U = E^{-1}
        typename Ops::V piv = w[k][k];
        for (long i = 0; i < d; ++i) w[i][k] = ops.div(w[i][k], piv);
        for (long jj = 0; jj < d; ++jj) u[k][jj] = ops.mul(piv, u[k][jj]);
        // clear the pivot row to the right by column operations
        for (long j = k + 1; j < d; ++j) {
            typename Ops::V a = w[k][j];
            for (long i = 0; i < d; ++i) {
                w[i][j] = ops.sub(w[i][j], ops.mul(a, w[i][k]));
            }
            for (long jj = 0; jj < d; ++jj) {
                u[k][jj] = ops.add(u[k][jj], ops.mul(a, u[j][jj]));
            }
        }
    }
    return {std::move(w), std::move(u)};
}

PMatrix to_pmatrix(const MatrixOf<ZOps>& m, const PrimeContext& ctx) {
    std::vector<PadicScalar> es;
    for (const auto& row : m) {
        for (const auto& e : row) es.push_back(e);
    }
    return PMatrix::from_entries(static_cast<long>(m.size()),
                                 static_cast<long>(m[0].size()), std::move(es));
}

}  // namespace

LUFactors lu_factor(const PMatrix& m) {
    ZOps ops{m.context()};
    auto [l, u] = lu_generic(m, ops);
    return {to_pmatrix(l, m.context()), to_pmatrix(u, m.context())};
}

LUFactors lu_factor_pfloat(const PMatrix& m, const PFloatSystem& sys) {
    FOps ops{sys};
    auto [l, u] = lu_generic(m, ops);
    const long d = m.rows();
    std::vector<PadicScalar> ls, us;
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            ls.push_back(is_finite_nonzero(l[i][j], sys) ? to_scalar(l[i][j], sys)
                                                         : PadicScalar::exact_zero(sys.ctx));
            us.push_back(is_finite_nonzero(u[i][j], sys) ? to_scalar(u[i][j], sys)
                                                         : PadicScalar::exact_zero(sys.ctx));
        }
    }
    return {PMatrix::from_entries(d, d, std::move(ls)),
            PMatrix::from_entries(d, d, std::move(us))};
}

LUDifferential lu_differential(const PMatrix& m, const PMatrix& dm, long internal_prec) {
    const long d = m.rows();
    long base = 0;
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            if (!m.at(i, j).is_exact()) base = std::max(base, m.at(i, j).abs_precision());
        }
    }
    PMatrix lifted = lift_matrix(m, base + internal_prec);
    auto [L, U] = lu_factor(lifted);
    PMatrix Li = pmatrix_inverse(L);
    PMatrix Ui = pmatrix_inverse(U);
    PMatrix X = pmatrix_mul(pmatrix_mul(Li, dm), Ui);
    const PrimeContext& ctx = m.context();
    PMatrix lo(d, d, ctx), up(d, d, ctx);
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            if (i > j) {
                lo.at(i, j) = X.at(i, j);
            } else {
                up.at(i, j) = X.at(i, j);
            }
        }
    }
    return {pmatrix_mul(L, lo), pmatrix_mul(up, U)};
}

PMatrix lu_jacobian(const PMatrix& m, long internal_prec) {
    const long d = m.rows();
    const PrimeContext& ctx = m.context();
    std::vector<std::pair<long, long>> lower;
    for (long i = 1; i < d; ++i) {
        for (long j = 0; j < i; ++j) lower.push_back({i, j});
    }
    PMatrix out(d * d, static_cast<long>(lower.size()), ctx);
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            PMatrix dm(d, d, ctx);
            dm.at(i, j) = PadicScalar::exact_integer(1, ctx);
            LUDifferential diff = lu_differential(m, dm, internal_prec);
            for (std::size_t c = 0; c < lower.size(); ++c) {
                out.at(i * d + j, static_cast<long>(c)) =
                    diff.dL.at(lower[c].first, lower[c].second);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bezout
// ---------------------------------------------------------------------------

namespace {

using ZPoly = std::vector<PadicScalar>;

ZPoly trim(ZPoly a) {
    while (a.size() > 1 && a.back().is_exact_zero()) a.pop_back();
    return a;
}

ZPoly poly_add(const ZPoly& a, const ZPoly& b, const PrimeContext& ctx) {
    ZPoly r(std::max(a.size(), b.size()), PadicScalar::exact_zero(ctx));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = zadd(r[i], a[i]);
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = zadd(r[i], b[i]);
    return trim(r);
}

ZPoly poly_neg(const ZPoly& a) {
    ZPoly r = a;
    for (auto& c : r) c = zneg(c);
    return r;
}

ZPoly poly_mul(const ZPoly& a, const ZPoly& b, const PrimeContext& ctx) {
    ZPoly r(a.size() + b.size() - 1, PadicScalar::exact_zero(ctx));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            r[i + j] = zadd(r[i + j], zmul(a[i], b[j]));
        }
    }
    return trim(r);
}

// polynomial division; the divisor's leading coefficient must be visible
std::pair<ZPoly, ZPoly> poly_divmod(ZPoly a, const ZPoly& b, const PrimeContext& ctx) {
    a = trim(a);
    ZPoly bb = b;  // already trimmed by construction
    if (bb.back().contains_zero()) {
        throw InexactZeroDivision("poly_divmod: leading coefficient indistinguishable from 0");
    }
    if (a.size() < bb.size()) return {ZPoly{PadicScalar::exact_zero(ctx)}, a};
    ZPoly q(a.size() - bb.size() + 1, PadicScalar::exact_zero(ctx));
    while (a.size() >= bb.size()) {
        if (a.back().is_exact_zero()) {
            a.pop_back();
            continue;
        }
        if (a.back().contains_zero()) {
            // the current leading coefficient is an inexact zero; it cannot
            // be cancelled, only dropped from the quotient's perspective
            a.pop_back();
            continue;
        }
        PadicScalar c = zdiv(a.back(), bb.back());
        std::size_t k = a.size() - bb.size();
        q[k] = zadd(q[k], c);
        for (std::size_t i = 0; i < bb.size(); ++i) {
            a[k + i] = zsub(a[k + i], zmul(c, bb[i]));
        }
        a.pop_back();
        while (a.size() > 1 && a.back().is_exact_zero()) a.pop_back();
    }
    if (a.empty()) a.push_back(PadicScalar::exact_zero(ctx));
    return {trim(q), trim(a)};
}

}  // namespace

BezoutPair bezout(const PPolynomial& p, const PPolynomial& q) {
    const PrimeContext& ctx = p.context();
    ZPoly r0 = trim(p.coeffs()), r1 = trim(q.coeffs());
    ZPoly u0{PadicScalar::exact_integer(1, ctx)}, u1{PadicScalar::exact_zero(ctx)};
    ZPoly v0{PadicScalar::exact_zero(ctx)}, v1{PadicScalar::exact_integer(1, ctx)};
    while (r1.size() > 1) {
        auto [qq, rr] = poly_divmod(r0, r1, ctx);
        r0 = r1;
        r1 = rr;
        ZPoly nu = poly_add(u0, poly_neg(poly_mul(qq, u1, ctx)), ctx);
        ZPoly nv = poly_add(v0, poly_neg(poly_mul(qq, v1, ctx)), ctx);
        u0 = u1;
        v0 = v1;
        u1 = nu;
        v1 = nv;
    }
    if (r1[0].contains_zero()) {
        // the remainder vanished at working precision before reaching a
        // visible constant: the inputs are not certifiably coprime
        throw InexactZeroDivision("bezout: gcd indistinguishable from 0 at this precision");
    }
    PadicScalar c = r1[0];
    ZPoly u = u1, v = v1;
    for (auto& e : u) e = zdiv(e, c);
    for (auto& e : v) e = zdiv(e, c);
    return {PPolynomial(u, ctx), PPolynomial(v, ctx)};
}

BezoutPair bezout_boosted(const PPolynomial& p, const PPolynomial& q, long boost) {
    const PrimeContext& ctx = p.context();
    long base = 0;
    for (const auto& c : p.coeffs()) {
        if (!c.is_exact()) base = std::max(base, c.abs_precision());
    }
    for (const auto& c : q.coeffs()) {
        if (!c.is_exact()) base = std::max(base, c.abs_precision());
    }
    auto lift_poly = [&](const PPolynomial& f) {
        std::vector<PadicScalar> cs;
        for (const auto& c : f.coeffs()) cs.push_back(lift_zero_fill(c, base + boost));
        return PPolynomial(std::move(cs), ctx);
    };
    BezoutPair hi = bezout(lift_poly(p), lift_poly(q));
    auto truncate_poly = [&](const PPolynomial& f) {
        std::vector<PadicScalar> cs;
        for (const auto& c : f.coeffs()) cs.push_back(truncate(c, base));
        return PPolynomial(std::move(cs), ctx);
    };
    return {truncate_poly(hi.u), truncate_poly(hi.v)};
}

BezoutDifferential bezout_differential(const PPolynomial& p, const PPolynomial& q,
                                       const PPolynomial& u, const PPolynomial& v,
                                       const PPolynomial& dp, const PPolynomial& dq) {
    const PrimeContext& ctx = p.context();
    // dR = -U dP - V dQ
    ZPoly dr = poly_add(poly_neg(poly_mul(u.coeffs(), dp.coeffs(), ctx)),
                        poly_neg(poly_mul(v.coeffs(), dq.coeffs(), ctx)), ctx);
    ZPoly du = poly_divmod(poly_mul(u.coeffs(), dr, ctx), trim(q.coeffs()), ctx).second;
    ZPoly dv = poly_divmod(poly_mul(v.coeffs(), dr, ctx), trim(p.coeffs()), ctx).second;
    return {PPolynomial(du, ctx), PPolynomial(dv, ctx)};
}

PMatrix bezout_jacobian(const PPolynomial& p, const PPolynomial& q, long internal_prec) {
    const PrimeContext& ctx = p.context();
    const long d = p.degree();
    long base = 0;
    for (const auto& c : p.coeffs()) {
        if (!c.is_exact()) base = std::max(base, c.abs_precision());
    }
    auto lift_poly = [&](const PPolynomial& f) {
        std::vector<PadicScalar> cs;
        for (const auto& c : f.coeffs()) cs.push_back(lift_zero_fill(c, base + internal_prec));
        return PPolynomial(std::move(cs), ctx);
    };
    PPolynomial P = lift_poly(p), Q = lift_poly(q);
    BezoutPair uv = bezout(P, Q);
    PMatrix out(2 * d, 2 * d, ctx);
    for (long which = 0; which < 2; ++which) {
        for (long k = 0; k < d; ++k) {
            std::vector<PadicScalar> zero(1, PadicScalar::exact_zero(ctx));
            std::vector<PadicScalar> basis(k + 1, PadicScalar::exact_zero(ctx));
            basis[k] = PadicScalar::exact_integer(1, ctx);
            PPolynomial dp(which == 0 ? basis : zero, ctx);
            PPolynomial dq(which == 0 ? zero : basis, ctx);
            BezoutDifferential diff = bezout_differential(P, Q, uv.u, uv.v, dp, dq);
            long row = which * d + k;
            for (long c = 0; c < d; ++c) {
                out.at(row, c) = c <= diff.du.degree() ? diff.du.coeff(c)
                                                       : PadicScalar::exact_zero(ctx);
                out.at(row, d + c) = c <= diff.dv.degree() ? diff.dv.coeff(c)
                                                           : PadicScalar::exact_zero(ctx);
            }
        }
    }
    return out;
}

long bezout_hyperplane_diffused(const PMatrix& jac, bool full_image) {
    const PrimeContext& ctx = jac.context();
    const long two_d = jac.cols();
    const long d = two_d / 2;
    // hyperplane coordinates: dU (all d coefficients) plus dV without its
    // top coefficient, which is determined by dU's
    const long dim = 2 * d - 1;
    long rows = full_image ? jac.rows() : jac.rows() - 1;
    std::vector<PadicScalar> es;
    for (long i = 0; i < rows; ++i) {
        for (long c = 0; c < d; ++c) es.push_back(jac.at(i, c));
        for (long c = 0; c < d - 1; ++c) es.push_back(jac.at(i, d + c));
    }
    PMatrix img = PMatrix::from_entries(rows, dim, std::move(es));
    HermiteResult h = hermite_nf_rect(img);
    return diffused_digits(PrecisionLattice(h.form));
}

// ---------------------------------------------------------------------------
// Evaluation / interpolation
// ---------------------------------------------------------------------------

namespace {

template <class Ops>
std::vector<typename Ops::V> eval_generic(const PPolynomial& p, const Ops& ops) {
    const long d = p.degree();
    std::vector<typename Ops::V> coeffs;
    for (const auto& c : p.coeffs()) coeffs.push_back(ops.from_scalar(c));
    std::vector<typename Ops::V> out;
    for (long point = 0; point <= d; ++point) {
        // Horner at the integer point
        typename Ops::V pv = ops.from_scalar(
            PadicScalar::exact_integer(point, p.context()));
        typename Ops::V acc = coeffs.back();
        for (long k = d - 1; k >= 0; --k) acc = ops.add(ops.mul(acc, pv), coeffs[k]);
        out.push_back(acc);
    }
    return out;
}

template <class Ops>
std::vector<typename Ops::V> interp_generic(const std::vector<typename Ops::V>& values,
                                            const Ops& ops, const PrimeContext& ctx) {
    const long d = static_cast<long>(values.size()) - 1;
    // forward differences a_k = Delta^k y(0)
    std::vector<typename Ops::V> table = values;
    std::vector<typename Ops::V> deltas;
    deltas.push_back(table[0]);
    for (long k = 1; k <= d; ++k) {
        for (long i = 0; i + k <= d; ++i) table[i] = ops.sub(table[i + 1], table[i]);
        deltas.push_back(table[0]);
    }
    // P = sum_k a_k binom(X, k); binom numerators are exact integers
    std::vector<typename Ops::V> out(d + 1, ops.zero());
    std::vector<mpz_class> falling{1};  // X(X-1)...(X-k+1), ascending coeffs
    mpz_class kfact = 1;
    for (long k = 0; k <= d; ++k) {
        if (k > 0) {
            // falling *= (X - (k-1))
            std::vector<mpz_class> next(falling.size() + 1, 0);
            for (std::size_t i = 0; i < falling.size(); ++i) {
                next[i + 1] += falling[i];
                next[i] -= falling[i] * (k - 1);
            }
            falling = std::move(next);
            kfact *= k;
        }
        typename Ops::V scale =
            ops.div(deltas[k], ops.from_scalar(PadicScalar::exact_integer(kfact, ctx)));
        for (std::size_t i = 0; i < falling.size(); ++i) {
            if (falling[i] == 0) continue;
            typename Ops::V c =
                ops.mul(scale, ops.from_scalar(PadicScalar::exact_integer(falling[i], ctx)));
            out[i] = ops.add(out[i], c);
        }
    }
    return out;
}

}  // namespace

std::vector<PadicScalar> evaluate_at_first_integers(const PPolynomial& p) {
    ZOps ops{p.context()};
    return eval_generic(p, ops);
}

PPolynomial interpolate_divided_differences(const std::vector<PadicScalar>& values,
                                            const PrimeContext& ctx) {
    ZOps ops{ctx};
    return PPolynomial(interp_generic(values, ops, ctx), ctx);
}

std::vector<PFloat> evaluate_at_first_integers_pfloat(const PPolynomial& p,
                                                      const PFloatSystem& sys) {
    FOps ops{sys};
    return eval_generic(p, ops);
}

std::vector<PFloat> interpolate_divided_differences_pfloat(const std::vector<PFloat>& values,
                                                           const PFloatSystem& sys) {
    FOps ops{sys};
    return interp_generic(values, ops, sys.ctx);
}

std::vector<Rational> evaluate_at_first_integers_exact(const PPolynomial& p) {
    QOps ops{p.context()};
    return eval_generic(p, ops);
}

std::vector<Rational> interpolate_divided_differences_exact(const std::vector<Rational>& values) {
    PrimeContext ctx(2);  // the prime is irrelevant for exact arithmetic
    QOps ops{ctx};
    return interp_generic(values, ops, ctx);
}

long vandermonde_diffused_digits(long d, const PrimeContext& ctx) {
    // val(det Vandermonde(0..d)) = val(1! 2! ... d!) and the column minima
    // vanish, so the diffused count is the determinant valuation itself
    mpz_class total = 0;
    for (long n = 1; n <= d; ++n) total += legendre_factorial_valuation(n, ctx);
    if (!total.fits_slong_p()) throw DomainError("vandermonde_diffused_digits: overflow");
    return total.get_si();
}

// ---------------------------------------------------------------------------
// Hilbert matrices
// ---------------------------------------------------------------------------

mpz_class hilbert_inverse_entry(long n, long i, long j) {
    auto binom = [](long a, long b) {
        mpz_class r;
        if (b < 0 || b > a) return mpz_class(0);
        mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a),
                     static_cast<unsigned long>(b));
        return r;
    };
    mpz_class r = mpz_class(i + j - 1) * binom(n + i - 1, n - j) * binom(n + j - 1, n - i) *
                  binom(i + j - 2, i - 1) * binom(i + j - 2, i - 1);
    if ((i + j) % 2) r = -r;
    return r;
}

HilbertOutcome hilbert_experiment(long n, const PFloatSystem& sys) {
    const PrimeContext& ctx = sys.ctx;
    // H_n over floats, inverted by Gaussian elimination with
    // smallest-valuation pivoting on the augmented system
    std::vector<std::vector<PFloat>> aug(
        n, std::vector<PFloat>(2 * n, pfloat_zero(sys)));
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) {
            aug[i][j] = round_rational(Rational(1, i + j + 1), sys);
        }
        aug[i][n + i] = normalize(0, 1, sys);
    }
    for (long k = 0; k < n; ++k) {
        long piv = -1;
        long best = 0;
        for (long i = k; i < n; ++i) {
            if (!is_finite_nonzero(aug[i][k], sys)) continue;
            if (piv < 0 || aug[i][k].e < best) {
                piv = i;
                best = aug[i][k].e;
            }
        }
        if (piv < 0) throw PrecisionInsufficient("hilbert_experiment: singular at float level");
        std::swap(aug[k], aug[piv]);
        PFloat pv = aug[k][k];
        for (long j = 0; j < 2 * n; ++j) aug[k][j] = fdiv(aug[k][j], pv, sys);
        for (long i = 0; i < n; ++i) {
            if (i == k) continue;
            PFloat f = aug[i][k];
            if (is_zero(f, sys)) continue;
            for (long j = 0; j < 2 * n; ++j) {
                aug[i][j] = fsub(aug[i][j], fmul(f, aug[k][j], sys), sys);
            }
        }
    }

    HilbertOutcome out;
    out.n = n;
    long total = 0;
    out.min_correct_digits = sys.N;
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) {
            mpz_class ref = hilbert_inverse_entry(n, i + 1, j + 1);
            const PFloat& got = aug[i][n + j];
            Rational gv = is_finite_nonzero(got, sys) ? to_scalar(got, sys).to_rational()
                                                      : Rational(0);
            long agree = digit_agreement(Rational(ref), gv, sys.N, ctx);
            total += agree;
            out.min_correct_digits = std::min(out.min_correct_digits, agree);
            if (n <= 6) {
                out.report.rows.push_back(
                    {"H" + std::to_string(n) + "inv[" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + "]",
                     "pfloat", print_pfloat(got, sys), "N=" + std::to_string(sys.N),
                     ref.get_str(), agree});
            }
        }
    }
    out.average_correct_digits = static_cast<double>(total) / static_cast<double>(n * n);
    return out;
}

// ---------------------------------------------------------------------------
// Somos 4
// ---------------------------------------------------------------------------

SomosMode somos_mode_from_string(const std::string& name) {
    if (name == "rational-oracle") return SomosMode::rational_oracle;
    if (name == "naive-zealous") return SomosMode::naive_zealous;
    if (name == "naive-pfloat") return SomosMode::naive_pfloat;
    if (name == "naive-lazy") return SomosMode::naive_lazy;
    if (name == "stabilized-zealous") return SomosMode::stabilized_zealous;
    if (name == "stabilized-lazy") return SomosMode::stabilized_lazy;
    throw DomainError("unknown somos mode: " + name);
}

std::string to_string(SomosMode mode) {
    switch (mode) {
        case SomosMode::rational_oracle: return "rational-oracle";
        case SomosMode::naive_zealous: return "naive-zealous";
        case SomosMode::naive_pfloat: return "naive-pfloat";
        case SomosMode::naive_lazy: return "naive-lazy";
        case SomosMode::stabilized_zealous: return "stabilized-zealous";
        case SomosMode::stabilized_lazy: return "stabilized-lazy";
    }
    throw DomainError("unknown somos mode");
}

std::vector<Rational> somos_exact_terms(const std::array<mpz_class, 4>& seeds, long n) {
    std::vector<Rational> u;
    u.reserve(n);
    for (const auto& s : seeds) u.push_back(Rational(s));
    while (static_cast<long>(u.size()) < n) {
        std::size_t k = u.size();
        u.push_back((u[k - 3] * u[k - 1] + u[k - 2] * u[k - 2]) / u[k - 4]);
    }
    u.resize(n);
    return u;
}

namespace {

SomosOutcome somos_rational(const std::array<mpz_class, 4>& seeds, long n,
                            const PrimeContext& ctx, long N) {
    auto u = somos_exact_terms(seeds, n);
    SomosOutcome out;
    out.exact = u.back();
    out.value = PadicScalar::from_rational(u.back(), N, ctx);
    for (long k = 5; k <= n; ++k) {
        PadicScalar s = PadicScalar::from_rational(u[k - 1], N, ctx);
        out.table.push_back({k, print_digits_padded(s)});
    }
    return out;
}

SomosOutcome somos_naive_zealous(const std::array<mpz_class, 4>& seeds, long n,
                                 const PrimeContext& ctx, long N) {
    SomosOutcome out;
    PadicScalar x = PadicScalar::from_value(seeds[0], N, ctx);
    PadicScalar y = PadicScalar::from_value(seeds[1], N, ctx);
    PadicScalar z = PadicScalar::from_value(seeds[2], N, ctx);
    PadicScalar t = PadicScalar::from_value(seeds[3], N, ctx);
    for (long i = 1; i <= n - 4; ++i) {
        PadicScalar next;
        try {
            next = zdiv(zadd(zmul(y, t), zmul(z, z)), x);
        } catch (const InexactZeroDivision&) {
            out.failed_at = i + 4;
            return out;
        }
        x = y;
        y = z;
        z = t;
        t = next;
        if (!t.is_exact() && t.abs_precision() >= 1 && t.valuation_or(0) >= 0) {
            out.table.push_back({i + 4, print_digits_padded(t)});
        }
    }
    out.value = t;
    return out;
}

SomosOutcome somos_naive_pfloat(const std::array<mpz_class, 4>& seeds, long n,
                                const PrimeContext& ctx, long N) {
    PFloatSystem sys(ctx, N);
    SomosOutcome out;
    PFloat x = round_rational(Rational(seeds[0]), sys);
    PFloat y = round_rational(Rational(seeds[1]), sys);
    PFloat z = round_rational(Rational(seeds[2]), sys);
    PFloat t = round_rational(Rational(seeds[3]), sys);
    for (long i = 1; i <= n - 4; ++i) {
        PFloat next = fdiv(fadd(fmul(y, t, sys), fmul(z, z, sys), sys), x, sys);
        if (is_inf(next, sys) || is_nan(next, sys)) {
            out.failed_at = i + 4;
            return out;
        }
        x = y;
        y = z;
        z = t;
        t = next;
        out.table.push_back({i + 4, print_pfloat(t, sys)});
    }
    if (is_finite_nonzero(t, sys)) out.value = truncate(to_scalar(t, sys), t.e + N);
    return out;
}

SomosOutcome somos_naive_lazy(const std::array<mpz_class, 4>& seeds, long n,
                              const PrimeContext& ctx, long N) {
    SomosOutcome out;
    std::array<LazyNumber, 4> instrumented;
    std::vector<LazyNumber> u;
    for (int i = 0; i < 4; ++i) {
        instrumented[i] = LazyNumber::instrumented(LazyNumber::constant(seeds[i], ctx));
        u.push_back(instrumented[i]);
    }
    try {
        for (long k = 5; k <= n; ++k) {
            std::size_t s = u.size();
            LazyNumber num =
                lazy_add(lazy_mul(u[s - 3], u[s - 1]), lazy_mul(u[s - 2], u[s - 2]));
            u.push_back(lazy_div(num, u[s - 4]));
        }
        out.value = u.back().to_scalar(N);
    } catch (const ValuationCapExceeded&) {
        out.failed_at = static_cast<long>(u.size()) + 1;
    }
    for (int i = 0; i < 4; ++i) out.seed_demand[i] = instrumented[i].high_water() + 1;
    return out;
}

// the paper's stabilized loop as a step chain for the adaptive driver
SomosOutcome somos_stabilized_zealous(const std::array<mpz_class, 4>& seeds, long n,
                                      const PrimeContext& ctx, long N) {
    StepChain chain;
    auto step_eval = [ctx](const std::vector<PadicScalar>& s) {
        return std::vector<PadicScalar>{
            s[1], s[2], s[3], zdiv(zadd(zmul(s[1], s[3]), zmul(s[2], s[2])), s[0])};
    };
    auto step_plan = [ctx, N](const std::vector<PadicScalar>& s) {
        // precompute the next term at the incoming precision to read off v
        PadicScalar u = zdiv(zadd(zmul(s[1], s[3]), zmul(s[2], s[2])), s[0]);
        long v = s[1].valuation_or(s[1].abs_precision()) +
                 s[2].valuation_or(s[2].abs_precision()) +
                 s[3].valuation_or(s[3].abs_precision()) + u.valuation_or(u.abs_precision());
        if (v >= N) {
            throw PrecisionError("somos: window valuation " + std::to_string(v) +
                                 " >= N = " + std::to_string(N));
        }
        long lift = N + v + s[0].valuation_or(s[0].abs_precision());
        return StepPlan{std::vector<long>(4, lift),
                        PrecisionLattice::diagonal({N + v, N + v, N + v, N + v},
                                                   s[0].context())};
    };
    for (long i = 1; i <= n - 4; ++i) chain.steps.push_back({step_plan, step_eval});
    chain.final_prec = {N, N, N, N};

    std::vector<PadicScalar> state;
    for (const auto& s : seeds) state.push_back(PadicScalar::from_value(s, N, ctx));
    SomosOutcome out;
    try {
        auto final_state = run_adaptive(chain, std::move(state));
        out.value = final_state[3];
    } catch (const PrecisionError&) {
        out.precision_error = true;
    } catch (const InexactZeroDivision&) {
        out.precision_error = true;
    }
    return out;
}

SomosOutcome somos_stabilized_lazy(const std::array<mpz_class, 4>& seeds, long n,
                                   const PrimeContext& ctx, long N) {
    // evaluate the inputs at precision p^N H_{0,min} (zero-filled snapshots),
    // then run the recurrence exactly with the per-step valuation guard
    SomosOutcome out;
    mpz_class m = ctx.pow(N);
    std::array<Rational, 4> w;
    for (int i = 0; i < 4; ++i) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), seeds[i].get_mpz_t(), m.get_mpz_t());
        w[i] = Rational(r);
    }
    Rational x = w[0], y = w[1], z = w[2], t = w[3];
    auto valq = [&](const Rational& q) -> long {
        auto v = valuation(q, ctx);
        return v ? *v : N;  // an exact zero behaves like O(p^N) here
    };
    for (long i = 1; i <= n - 4; ++i) {
        Rational u = (y * t + z * z) / x;
        long v = valq(y) + valq(z) + valq(t) + valq(u);
        if (v >= N) {
            out.precision_error = true;
            return out;
        }
        x = y;
        y = z;
        z = t;
        t = u;
    }
    out.exact = t;
    out.value = PadicScalar::from_rational(t, N, ctx);
    return out;
}

}  // namespace

SomosOutcome somos(const std::array<mpz_class, 4>& seeds, long n, SomosMode mode,
                   const PrimeContext& ctx, long N) {
    if (n < 5) throw DomainError("somos: n must be >= 5");
    switch (mode) {
        case SomosMode::rational_oracle: return somos_rational(seeds, n, ctx, N);
        case SomosMode::naive_zealous: return somos_naive_zealous(seeds, n, ctx, N);
        case SomosMode::naive_pfloat: return somos_naive_pfloat(seeds, n, ctx, N);
        case SomosMode::naive_lazy: return somos_naive_lazy(seeds, n, ctx, N);
        case SomosMode::stabilized_zealous:
            return somos_stabilized_zealous(seeds, n, ctx, N);
        case SomosMode::stabilized_lazy: return somos_stabilized_lazy(seeds, n, ctx, N);
    }
    throw DomainError("somos: unknown mode");
}

PMatrix somos_jacobian(const std::array<mpz_class, 4>& seeds, long steps,
                       const PrimeContext& ctx, long prec) {
    // chain rule over exact rationals: J(phi_i) = J(sigma)_{x_{i-1}} ... J(sigma)_x
    auto u = somos_exact_terms(seeds, steps + 4);
    std::vector<std::vector<Rational>> jac(4, std::vector<Rational>(4, Rational(0)));
    for (int i = 0; i < 4; ++i) jac[i][i] = 1;
    for (long s = 0; s < steps; ++s) {
        Rational x = u[s], y = u[s + 1], z = u[s + 2], t = u[s + 3];
        Rational tp = (y * t + z * z) / x;
        // step Jacobian rows (inputs) x columns (outputs y, z, t, t')
        Rational J[4][4] = {{0, 0, 0, -tp / x},
                            {1, 0, 0, t / x},
                            {0, 1, 0, 2 * z / x},
                            {0, 0, 1, y / x}};
        std::vector<std::vector<Rational>> next(4, std::vector<Rational>(4, Rational(0)));
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                for (int k = 0; k < 4; ++k) next[i][j] += jac[i][k] * J[k][j];
            }
        }
        jac = std::move(next);
    }
    std::vector<PadicScalar> es;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            es.push_back(PadicScalar::from_rational(jac[i][j], prec, ctx));
        }
    }
    return PMatrix::from_entries(4, 4, std::move(es));
}

// ---------------------------------------------------------------------------
// Adaptive driver
// ---------------------------------------------------------------------------

std::vector<PadicScalar> run_adaptive(const StepChain& chain, std::vector<PadicScalar> state) {
    for (const auto& step : chain.steps) {
        StepPlan plan = step.plan(state);
        if (plan.lift_exponents.size() != state.size()) {
            throw DomainError("run_adaptive: lift exponent count mismatch");
        }
        for (std::size_t i = 0; i < state.size(); ++i) {
            state[i] = lift_zero_fill(state[i], plan.lift_exponents[i]);
        }
        state = step.eval(state);
        // the zealous output must reach H_{i,min}: each coordinate ball
        // p^{abs_j} e_j must lie inside the step's min lattice (exact
        // coordinates carry no uncertainty and pass trivially)
        const PrimeContext& ctx = state[0].context();
        for (std::size_t j = 0; j < state.size(); ++j) {
            if (state[j].is_exact()) continue;
            std::vector<PadicScalar> basis(state.size(), PadicScalar::exact_zero(ctx));
            basis[j] = PadicScalar::exact_shifted(state[j].abs_precision(), 1, ctx);
            if (!plan.h_min.contains_vector(basis)) {
                throw LiftPolicyFailure("run_adaptive: step output precision misses H_min");
            }
        }
    }
    if (chain.final_prec.size() != state.size()) {
        throw DomainError("run_adaptive: final truncation size mismatch");
    }
    for (std::size_t i = 0; i < state.size(); ++i) {
        state[i] = truncate(state[i], chain.final_prec[i]);
    }
    return state;
}

// ---------------------------------------------------------------------------
// Experiment reports
// ---------------------------------------------------------------------------

namespace {

std::string prec_string(const PadicScalar& x) {
    if (x.is_exact()) return "exact";
    std::ostringstream os;
    os << "O(" << x.context().prime().get_str() << "^" << x.abs_precision() << ")";
    return os.str();
}

ReportRow scalar_row(const std::string& id, const std::string& backend, const PadicScalar& x,
                     const Rational& reference, long limit) {
    long agree = digit_agreement(reference, x.to_rational(), limit, x.context());
    return {id, backend, print_scalar(x, PrintStyle::digits), prec_string(x),
            print_scalar(PadicScalar::from_rational(reference, limit, x.context()),
                         PrintStyle::digits),
            agree};
}

}  // namespace

ExperimentReport det_experiment(long prec, long float_prec) {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2, prec);
    ExperimentReport rep;
    Rational ref = det_exact(m);
    PadicScalar z = det_division_free(m);
    rep.rows.push_back(scalar_row("detM", "zealous", z, ref, prec + 5));
    PFloatSystem sys(p2, float_prec);
    PFloat f = det_division_free_pfloat(m, sys);
    rep.rows.push_back({"detM", "pfloat", print_pfloat(f, sys),
                        "N=" + std::to_string(float_prec), ref.get_str(),
                        digit_agreement(ref, is_finite_nonzero(f, sys)
                                                 ? to_scalar(f, sys).to_rational()
                                                 : Rational(0),
                                        float_prec, p2)});
    PadicScalar opt = det_optimal(m);
    rep.rows.push_back(scalar_row("detM", "smith-optimal", opt, ref, prec + 5));
    return rep;
}

ExperimentReport charpoly_experiment(long prec, long float_prec) {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2, prec);
    ExperimentReport rep;
    auto exact = charpoly_exact(m);
    PPolynomial z = charpoly(m);
    for (long k = 0; k <= z.degree(); ++k) {
        rep.rows.push_back(scalar_row("chiM[X^" + std::to_string(k) + "]", "zealous",
                                      z.coeff(k), exact[k], prec + 5));
    }
    PFloatSystem sys(p2, float_prec);
    auto f = charpoly_pfloat(m, sys);
    for (std::size_t k = 0; k < f.size(); ++k) {
        Rational fv = is_finite_nonzero(f[k], sys) ? to_scalar(f[k], sys).to_rational()
                                                   : Rational(0);
        rep.rows.push_back({"chiM[X^" + std::to_string(k) + "]", "pfloat",
                            print_pfloat(f[k], sys), "N=" + std::to_string(float_prec),
                            exact[k].get_str(),
                            digit_agreement(exact[k], fv, float_prec, p2)});
    }
    return rep;
}

ExperimentReport lu_experiment(long prec, long float_prec) {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2, prec);
    ExperimentReport rep;
    // exact reference from a high-precision run
    PMatrix hi = lift_matrix(m, prec + 40);
    LUFactors exact = lu_factor(hi);
    LUFactors z = lu_factor(m);
    PFloatSystem sys(p2, float_prec);
    LUFactors f = lu_factor_pfloat(m, sys);
    for (long i = 1; i < 4; ++i) {
        for (long j = 0; j < i; ++j) {
            Rational ref = exact.L.at(i, j).to_rational();
            std::string id = "L[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]";
            rep.rows.push_back(scalar_row(id, "zealous", z.L.at(i, j), ref, prec + 5));
            rep.rows.push_back(scalar_row(id, "pfloat", f.L.at(i, j), ref, float_prec));
        }
    }
    return rep;
}

ExperimentReport bezout_experiment(long prec, long float_prec) {
    PrimeContext p2(2);
    PPolynomial P = fixtures::bezout_p(p2, prec), Q = fixtures::bezout_q(p2, prec);
    ExperimentReport rep;
    BezoutPair ref = bezout_boosted(P, Q, 40);
    BezoutPair z = bezout(P, Q);
    auto push = [&](const char* name, const PPolynomial& poly, const PPolynomial& refpoly,
                    const char* backend) {
        for (long k = 0; k <= refpoly.degree(); ++k) {
            PadicScalar c = k <= poly.degree() ? poly.coeff(k)
                                               : PadicScalar::exact_zero(p2);
            rep.rows.push_back(scalar_row(std::string(name) + "[X^" + std::to_string(k) + "]",
                                          backend, c, refpoly.coeff(k).to_rational(), prec));
        }
    };
    push("U", z.u, ref.u, "zealous");
    push("V", z.v, ref.v, "zealous");
    push("U", ref.u, ref.u, "boosted-reference");
    push("V", ref.v, ref.v, "boosted-reference");
    (void)float_prec;
    return rep;
}

ExperimentReport interp_experiment(long prec, long float_prec) {
    PrimeContext p2(2);
    PPolynomial P = fixtures::poly_deg8(p2, prec);
    ExperimentReport rep;
    auto values = evaluate_at_first_integers(P);
    PPolynomial back = interpolate_divided_differences(values, p2);
    PFloatSystem sys(p2, float_prec);
    auto fvalues = evaluate_at_first_integers_pfloat(P, sys);
    auto fback = interpolate_divided_differences_pfloat(fvalues, sys);
    for (long k = 0; k <= P.degree(); ++k) {
        Rational ref = P.coeff(k).to_rational();
        rep.rows.push_back(
            scalar_row("P[X^" + std::to_string(k) + "]", "zealous", back.coeff(k), ref, prec));
        Rational fv = is_finite_nonzero(fback[k], sys) ? to_scalar(fback[k], sys).to_rational()
                                                       : Rational(0);
        rep.rows.push_back({"P[X^" + std::to_string(k) + "]", "pfloat",
                            print_pfloat(fback[k], sys), "N=" + std::to_string(float_prec),
                            ref.get_str(), digit_agreement(ref, fv, float_prec, p2)});
    }
    return rep;
}

ExperimentReport somos_experiment(const std::array<mpz_class, 4>& seeds, long n, long prec) {
    PrimeContext p2(2);
    ExperimentReport rep;
    auto oracle = somos(seeds, n, SomosMode::rational_oracle, p2, prec);
    for (SomosMode mode : {SomosMode::rational_oracle, SomosMode::naive_zealous,
                           SomosMode::naive_pfloat, SomosMode::naive_lazy,
                           SomosMode::stabilized_zealous}) {
        SomosOutcome out = somos(seeds, n, mode, p2, prec);
        ReportRow row;
        row.id = "u" + std::to_string(n);
        row.backend = to_string(mode);
        row.agreeing_digits = -1;
        row.reference = oracle.value ? print_digits_padded(*oracle.value) : "";
        if (out.precision_error) {
            row.value = "PrecisionError";
            row.precision = "-";
        } else if (out.failed_at) {
            row.value = "fails at u" + std::to_string(*out.failed_at);
            row.precision = "-";
        } else if (out.value) {
            row.value = out.value->contains_zero() || out.value->valuation_or(0) >= 0
                            ? print_digits_padded(truncate(*out.value, prec))
                            : print_scalar(*out.value, PrintStyle::digits);
            row.precision = prec_string(*out.value);
            if (oracle.exact) {
                row.agreeing_digits =
                    digit_agreement(*oracle.exact, out.value->to_rational(), prec, p2);
            }
        }
        if (mode == SomosMode::naive_lazy && !out.failed_at) {
            row.precision = "demand(u1..u4)=" + std::to_string(out.seed_demand[0]) + "," +
                            std::to_string(out.seed_demand[1]) + "," +
                            std::to_string(out.seed_demand[2]) + "," +
                            std::to_string(out.seed_demand[3]);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace padlab
