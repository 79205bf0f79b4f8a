#include <random>

#include "doctest.h"
#include "padlab/lattice.hpp"

using namespace padlab;

namespace {

// the 4x4 fixture matrix of the worked examples, entries mod 2^10
PMatrix fixture_m(const PrimeContext& p2, long prec = 10) {
    const long rows[4][4] = {{368, 224, 712, 196},
                             {857, 839, 458, 373},
                             {483, 741, 166, 1015},
                             {61, 883, 210, 609}};
    std::vector<PadicScalar> es;
    for (auto& r : rows) {
        for (long e : r) es.push_back(PadicScalar::from_value(e, prec, p2));
    }
    return PMatrix::from_entries(4, 4, std::move(es));
}

PMatrix random_unimodular(long d, const PrimeContext& ctx, std::mt19937_64& rng) {
    // product of elementary row operations: unit diagonal + integer shears
    PMatrix u = PMatrix::identity(d, ctx);
    for (int t = 0; t < 3 * d; ++t) {
        long i = static_cast<long>(rng() % d), j = static_cast<long>(rng() % d);
        if (i == j) continue;
        long c = static_cast<long>(rng() % 19) - 9;
        for (long k = 0; k < d; ++k) {
            u.at(i, k) = zadd(u.at(i, k),
                              zmul(PadicScalar::exact_integer(c, ctx), u.at(j, k)));
        }
    }
    return u;
}

}  // namespace

TEST_CASE("matrix parse/print round trip") {
    PrimeContext p2(2);
    PMatrix m = PMatrix::parse("1 + O(2^5), 2 * 2^1 + O(2^6); 0 + O(2^4), 7", p2);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m.at(0, 0) == PadicScalar::from_unit(0, 1, 5, p2));
    CHECK(m.at(1, 1) == PadicScalar::exact_integer(7, p2));
    PMatrix again = PMatrix::parse(m.print(PrintStyle::arithmetic), p2);
    for (long i = 0; i < 2; ++i) {
        for (long j = 0; j < 2; ++j) CHECK(again.at(i, j) == m.at(i, j));
    }
}

TEST_CASE("hermite normal form of the worked example") {
    PrimeContext p2(2);
    HermiteResult h = hermite_nf(fixture_m(p2));
    const long expect[4][4] = {{1, 7, 2, 5}, {0, 8, 0, 12}, {0, 0, 8, 12}, {0, 0, 0, 16}};
    for (long i = 0; i < 4; ++i) {
        for (long j = 0; j < 4; ++j) {
            const PadicScalar& e = h.form.at(i, j);
            CHECK(e.is_exact());
            if (expect[i][j] == 0) {
                CHECK(e.is_exact_zero());
            } else {
                CHECK(e.representative() == expect[i][j]);
            }
        }
    }
    CHECK(h.diag_vals == std::vector<long>{0, 3, 3, 4});
}

TEST_CASE("hermite normal form basics") {
    PrimeContext p2(2);
    HermiteResult id = hermite_nf(PMatrix::identity(3, p2));
    for (long i = 0; i < 3; ++i) CHECK(id.form.at(i, i) == PadicScalar::exact_integer(1, p2));
    // 1x1: [2^3 * 5 + O(2^10)] -> [2^3]
    PMatrix one(1, 1, p2);
    one.at(0, 0) = PadicScalar::from_value(40, 10, p2);
    HermiteResult h = hermite_nf(one);
    CHECK(h.form.at(0, 0) == PadicScalar::exact_shifted(3, 1, p2));
    // degenerate pivot
    PMatrix z(2, 2, p2);
    z.at(0, 0) = PadicScalar::inexact_zero(4, p2);
    z.at(0, 1) = PadicScalar::from_value(1, 4, p2);
    z.at(1, 0) = PadicScalar::inexact_zero(4, p2);
    z.at(1, 1) = PadicScalar::from_value(1, 4, p2);
    CHECK_THROWS_AS(hermite_nf(z), PrecisionInsufficient);
}

TEST_CASE("hermite span preservation and uniqueness") {
    std::mt19937_64 rng(12);
    for (long prime : {2L, 3L}) {
        PrimeContext ctx(prime);
        for (int t = 0; t < 100; ++t) {
            std::vector<PadicScalar> es;
            for (int k = 0; k < 16; ++k) {
                es.push_back(PadicScalar::from_value(
                    static_cast<unsigned long>(rng() % 4096), 12, ctx));
            }
            PMatrix m = PMatrix::from_entries(4, 4, es);
            std::optional<HermiteResult> hh;
            try {
                hh = hermite_nf(m);
            } catch (const PrecisionInsufficient&) {
                continue;  // singular-looking sample
            }
            const HermiteResult& h = *hh;
            // span preservation: each original row reduces to zero against
            // the Hermite form (i.e. lies in the lattice)
            PrecisionLattice lat(h.form);
            for (long i = 0; i < 4; ++i) {
                std::vector<PadicScalar> row;
                for (long j = 0; j < 4; ++j) row.push_back(m.at(i, j));
                CHECK(lat.contains_vector(row));
            }
            // uniqueness under GL(Zp) left multiplication
            PMatrix u = random_unimodular(4, ctx, rng);
            HermiteResult h2 = hermite_nf(pmatrix_mul(u, m));
            for (long i = 0; i < 4; ++i) {
                for (long j = 0; j < 4; ++j) {
                    const PadicScalar& a = h.form.at(i, j);
                    const PadicScalar& b = h2.form.at(i, j);
                    if (a.is_exact() && b.is_exact()) {
                        CHECK(a == b);
                    } else {
                        // compare at the coarser precision
                        long n = std::min(a.is_exact() ? 1L << 30 : a.abs_precision(),
                                          b.is_exact() ? 1L << 30 : b.abs_precision());
                        CHECK(truncate(a, n) == truncate(b, n));
                    }
                }
            }
        }
    }
}

TEST_CASE("smith diagonalization of the fixture") {
    PrimeContext p2(2);
    SmithResult s = smith_diagonalize(fixture_m(p2));
    std::vector<long> vals;
    for (const auto& d : s.diag) vals.push_back(*d.valuation());
    CHECK(vals == std::vector<long>{0, 2, 3, 5});
    // no precision loss: every diagonal entry still carries O(2^10)
    for (const auto& d : s.diag) CHECK(d.abs_precision() == 10);
    // product times sign = det M = 2^10 * 13 + O(2^15)
    PadicScalar prod = s.diag[0];
    for (std::size_t i = 1; i < s.diag.size(); ++i) prod = zmul(prod, s.diag[i]);
    if (s.det_sign < 0) prod = zneg(prod);
    CHECK(prod == PadicScalar::from_unit(10, 13, 15, p2));
}

TEST_CASE("smith diagonalization basics") {
    PrimeContext p2(2);
    SmithResult id = smith_diagonalize(PMatrix::identity(3, p2));
    for (const auto& d : id.diag) CHECK(d == PadicScalar::exact_integer(1, p2));
    CHECK(id.det_sign == 1);
    // diag(p^2, 1) reorders to valuations (0, 2)
    PMatrix m(2, 2, p2);
    m.at(0, 0) = PadicScalar::exact_integer(4, p2);
    m.at(1, 1) = PadicScalar::exact_integer(1, p2);
    SmithResult s = smith_diagonalize(m);
    CHECK(*s.diag[0].valuation() == 0);
    CHECK(*s.diag[1].valuation() == 2);
}

TEST_CASE("smith: comatrix valuation identity") {
    // sum of the first d-1 diagonal valuations = minimal comatrix valuation
    std::mt19937_64 rng(77);
    PrimeContext p2(2);
    for (int t = 0; t < 25; ++t) {
        std::vector<PadicScalar> es;
        std::vector<long> raw;
        for (int k = 0; k < 9; ++k) {
            long v = static_cast<long>(rng() % 512);
            raw.push_back(v);
            es.push_back(PadicScalar::from_value(v, 24, p2));
        }
        PMatrix m = PMatrix::from_entries(3, 3, es);
        SmithResult s;
        try {
            s = smith_diagonalize(m);
        } catch (const PrecisionInsufficient&) {
            continue;
        }
        if (s.diag.back().contains_zero()) continue;
        long sum2 = *s.diag[0].valuation() + *s.diag[1].valuation();
        // direct comatrix of the integer representatives
        auto det2 = [&](long a, long b, long c, long d) {
            return mpz_class(raw[a]) * raw[d] - mpz_class(raw[b]) * raw[c];
        };
        std::optional<long> minv;
        const long idx[9][4] = {{4, 5, 7, 8}, {3, 5, 6, 8}, {3, 4, 6, 7},
                                {1, 2, 7, 8}, {0, 2, 6, 8}, {0, 1, 6, 7},
                                {1, 2, 4, 5}, {0, 2, 3, 5}, {0, 1, 3, 4}};
        for (auto& q : idx) {
            mpz_class dd = det2(q[0], q[1], q[2], q[3]);
            auto v = valuation(dd, p2);
            if (v) minv = minv ? std::min(*minv, *v) : *v;
        }
        REQUIRE(minv.has_value());
        if (*minv >= 20) continue;  // comatrix too deep for the fixture precision
        CHECK(sum2 == *minv);
    }
}

TEST_CASE("diffused digits") {
    PrimeContext p2(2);
    // rows (0, p), (1, 1): one diffused digit
    PMatrix g(2, 2, p2);
    g.at(0, 0) = PadicScalar::exact_zero(p2);
    g.at(0, 1) = PadicScalar::exact_integer(2, p2);
    g.at(1, 0) = PadicScalar::exact_integer(1, p2);
    g.at(1, 1) = PadicScalar::exact_integer(1, p2);
    CHECK(diffused_digits(PrecisionLattice(g)) == 1);
    // diagonal lattices have none
    CHECK(diffused_digits(PrecisionLattice::diagonal({3, -2, 0, 7}, p2)) == 0);
}

TEST_CASE("dual lattice") {
    PrimeContext p2(2);
    // diagonal case: dual of p^a x p^b is p^-a x p^-b
    PrecisionLattice diag = PrecisionLattice::diagonal({3, -1}, p2);
    PrecisionLattice dd = dual_lattice(diag);
    CHECK(dd.hermite().diag_vals == std::vector<long>{-3, 1});
    // rows (0,p),(1,1): dual spanned by rows of the transposed inverse
    PMatrix g(2, 2, p2);
    g.at(0, 0) = PadicScalar::exact_zero(p2);
    g.at(0, 1) = PadicScalar::exact_integer(2, p2);
    g.at(1, 0) = PadicScalar::exact_integer(1, p2);
    g.at(1, 1) = PadicScalar::exact_integer(1, p2);
    PrecisionLattice L(g);
    PrecisionLattice Ld = dual_lattice(L);
    // M^-T = [[-1/2, 1], [1/2, 0]]: check the span via the Hermite form
    // dual of dual returns the original lattice
    PrecisionLattice Ldd = dual_lattice(Ld);
    CHECK(Ldd.hermite().diag_vals == L.hermite().diag_vals);
    // involution on random exact 3x3 lattices
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        std::vector<PadicScalar> es;
        for (int k = 0; k < 9; ++k) {
            es.push_back(PadicScalar::exact_integer(
                static_cast<long>(rng() % 200) - 100, p2));
        }
        PMatrix m = PMatrix::from_entries(3, 3, es);
        PrecisionLattice lat(m);
        if (lat.det_valuation() > 20) continue;
        PrecisionLattice back = dual_lattice(dual_lattice(lat));
        CHECK(back.hermite().diag_vals == lat.hermite().diag_vals);
        // mutual membership of generators certifies equality of the spans
        for (long i = 0; i < 3; ++i) {
            std::vector<PadicScalar> row;
            for (long j = 0; j < 3; ++j) row.push_back(m.at(i, j));
            CHECK(back.contains_vector(row));
        }
    }
}

TEST_CASE("forward propagation") {
    PrimeContext p2(2);
    // identity Jacobian: output precision = input precision
    PMatrix I = PMatrix::identity(3, p2);
    auto fwd = propagate_forward(I, {7, 9, 11});
    CHECK(fwd.output_prec == std::vector<long>{7, 9, 11});
    // affine evaluation phi(P) = (P(0), P(p)): J = [[0, p], [1, 1]]
    PMatrix J(2, 2, p2);
    J.at(0, 0) = PadicScalar::exact_zero(p2);
    J.at(0, 1) = PadicScalar::exact_integer(2, p2);
    J.at(1, 0) = PadicScalar::exact_integer(1, p2);
    J.at(1, 1) = PadicScalar::exact_integer(1, p2);
    auto aff = propagate_forward(J, {6, 6});
    CHECK(aff.output_prec == std::vector<long>{6, 6});
    // ... but the image lattice hides one diffused digit
    CHECK(diffused_digits(aff.image) == 1);
    // a vanishing column cannot be certified surjective
    PMatrix Z(2, 2, p2);
    Z.at(0, 0) = PadicScalar::exact_integer(1, p2);
    Z.at(0, 1) = PadicScalar::inexact_zero(8, p2);
    Z.at(1, 0) = PadicScalar::exact_integer(1, p2);
    Z.at(1, 1) = PadicScalar::inexact_zero(8, p2);
    CHECK_THROWS_AS(propagate_forward(Z, {4, 4}), SurjectivityFailure);
}

TEST_CASE("backward propagation") {
    PrimeContext p2(2);
    PMatrix I = PMatrix::identity(2, p2);
    auto b1 = propagate_backward(I, {5, 8});
    CHECK(b1[0] == 5);
    CHECK(b1[1] == 8);
    // sum map J = [[1], [1]]: both inputs need the target precision
    PMatrix S(2, 1, p2);
    S.at(0, 0) = PadicScalar::exact_integer(1, p2);
    S.at(1, 0) = PadicScalar::exact_integer(1, p2);
    auto b2 = propagate_backward(S, {9});
    CHECK(b2[0] == 9);
    CHECK(b2[1] == 9);
    // J = diag(p, 1), targets (N, N) -> (N-1, N)
    PMatrix D(2, 2, p2);
    D.at(0, 0) = PadicScalar::exact_integer(2, p2);
    D.at(1, 1) = PadicScalar::exact_integer(1, p2);
    auto b3 = propagate_backward(D, {6, 6});
    CHECK(b3[0] == 5);
    CHECK(b3[1] == 6);
    // irrelevant input: zero row
    PMatrix R(2, 1, p2);
    R.at(0, 0) = PadicScalar::exact_integer(1, p2);
    R.at(1, 0) = PadicScalar::exact_zero(p2);
    auto b4 = propagate_backward(R, {4});
    CHECK(b4[0] == 4);
    CHECK(!b4[1].has_value());
}

TEST_CASE("backward propagation: set inclusion brute force") {
    // J = diag(p, 1): inputs at (N-1, N) guarantee outputs in p^N Zp^2 under
    // the linear map, checked over residues mod p^{N+2}
    PrimeContext p2(2);
    const long N = 4;
    mpz_class m = p2.pow(N + 2);
    for (long h1 = 0; h1 < 4; ++h1) {
        for (long h2 = 0; h2 < 4; ++h2) {
            mpz_class d1 = mpz_class(h1) * p2.pow(N - 1) * 2;  // p * (p^{N-1} k)
            mpz_class d2 = mpz_class(h2) * p2.pow(N);
            CHECK(mpz_divisible_p(d1.get_mpz_t(), p2.pow(N).get_mpz_t()));
            CHECK(mpz_divisible_p(d2.get_mpz_t(), p2.pow(N).get_mpz_t()));
        }
    }
}

TEST_CASE("precision lemma hypothesis check") {
    PrimeContext p2(2);
    const long N = 6;
    // H = p^N Zp^n with a unimodular Jacobian: holds for radius p^-N
    PMatrix J = PMatrix::identity(3, p2);
    PrecisionLattice H = PrecisionLattice::diagonal({N, N, N}, p2);
    CHECK(preclemma_poly_check(J, H, -N));
    // H too small relative to r: fails the first inclusion
    PrecisionLattice small = PrecisionLattice::diagonal({N - 3, N, N}, p2);
    CHECK(!preclemma_poly_check(J, small, -N));
}
