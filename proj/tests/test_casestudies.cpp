#include <random>

#include "doctest.h"
#include "padlab/casestudies.hpp"

using namespace padlab;

namespace {

long b2(const char* s) { return std::stol(s, nullptr, 2); }

}  // namespace

TEST_CASE("determinant of the fixture matrix") {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2);
    // zealous division-free: indistinguishable from 0 at O(2^10)
    PadicScalar z = det_division_free(m);
    CHECK(z.is_inexact_zero());
    CHECK(z.abs_precision() == 10);
    // Smith-optimal: 2^10 * 13 + O(2^15)
    PadicScalar opt = det_optimal(m);
    CHECK(opt == PadicScalar::from_unit(10, 13, 15, p2));
    // float (N = 10): exponent 10, last five significand digits 01101
    PFloatSystem sys(p2, 10);
    PFloat f = det_division_free_pfloat(m, sys);
    CHECK(is_finite_nonzero(f, sys));
    CHECK(f.e == 10);
    mpz_class low;
    mpz_fdiv_r(low.get_mpz_t(), f.s.get_mpz_t(), p2.pow(5).get_mpz_t());
    CHECK(low == 13);
    // exact determinant agrees with the optimal output
    Rational exact = det_exact(m);
    CHECK(digit_agreement(exact, opt.to_rational(), 5, p2) == 5);
    // identity
    CHECK(det_division_free(PMatrix::identity(3, p2)) == PadicScalar::exact_integer(1, p2));
    CHECK(det_optimal(PMatrix::identity(3, p2)) == PadicScalar::exact_integer(1, p2));
    // exact diag(p, p) stays exact
    PMatrix dg(2, 2, p2);
    dg.at(0, 0) = PadicScalar::exact_integer(2, p2);
    dg.at(1, 1) = PadicScalar::exact_integer(2, p2);
    CHECK(det_optimal(dg) == PadicScalar::exact_integer(4, p2));
}

TEST_CASE("determinant Jacobian") {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2);
    PMatrix jac = det_jacobian(m);
    // minimal valuation of the comatrix entries is 5
    long minv = 1 << 30;
    for (long r = 0; r < 16; ++r) minv = std::min(minv, *jac.at(r, 0).valuation());
    CHECK(minv == 5);
    // forward propagation: optimal precision on det M is O(2^15)
    auto fwd = propagate_forward(jac, std::vector<long>(16, 10));
    CHECK(fwd.output_prec == std::vector<long>{15});
    // identity: the comatrix of I_2 is I_2 flattened
    PMatrix jid = det_jacobian(PMatrix::identity(2, p2));
    CHECK(jid.at(0, 0).representative() == 1);
    CHECK(jid.at(1, 0).contains_zero());
    CHECK(jid.at(2, 0).contains_zero());
    CHECK(jid.at(3, 0).representative() == 1);
}

TEST_CASE("determinant Jacobian: finite differences") {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2);
    PMatrix jac = det_jacobian(m);
    const long k = 12;
    Rational det0 = det_exact(m);
    for (long i = 0; i < 4; ++i) {
        for (long j = 0; j < 4; ++j) {
            PMatrix pert = m;
            pert.at(i, j) = PadicScalar::from_value(
                pert.at(i, j).representative() + p2.pow(k), 40, p2);
            Rational det1 = det_exact(pert);
            Rational fd = (det1 - det0) / Rational(p2.pow(k));
            Rational diff = fd - jac.at(i * 4 + j, 0).to_rational();
            if (diff != 0) CHECK(*valuation(diff, p2) >= k);
        }
    }
}

TEST_CASE("characteristic polynomial of the fixture") {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2);
    PPolynomial chi = charpoly(m);
    CHECK(chi.degree() == 4);
    CHECK(chi.coeff(4) == PadicScalar::exact_integer(1, p2));
    CHECK(chi.coeff(3) == PadicScalar::from_value(b2("0001000010"), 10, p2));
    CHECK(chi.coeff(2) == PadicScalar::from_value(b2("1000101100"), 10, p2));
    CHECK(chi.coeff(1) == PadicScalar::from_value(b2("0011100000"), 10, p2));
    CHECK(chi.coeff(0).is_inexact_zero());
    CHECK(chi.coeff(0).abs_precision() == 10);
    // zero matrix: charpoly = X^d
    PMatrix z(3, 3, p2);
    for (long i = 0; i < 3; ++i) {
        for (long j = 0; j < 3; ++j) z.at(i, j) = PadicScalar::from_value(0, 10, p2);
    }
    PPolynomial xz = charpoly(z);
    CHECK(xz.coeff(3) == PadicScalar::exact_integer(1, p2));
    for (long kk = 0; kk < 3; ++kk) CHECK(xz.coeff(kk).contains_zero());
}

TEST_CASE("charpoly of I + M and its precision analysis") {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2);
    PMatrix n = m;
    for (long i = 0; i < 4; ++i) {
        n.at(i, i) = zadd(n.at(i, i), PadicScalar::exact_integer(1, p2));
    }
    PPolynomial chi = charpoly(n);
    CHECK(chi.coeff(3) == PadicScalar::from_value(b2("0000111110"), 10, p2));
    CHECK(chi.coeff(2) == PadicScalar::from_value(b2("0101101100"), 10, p2));
    CHECK(chi.coeff(1) == PadicScalar::from_value(b2("0101001010"), 10, p2));
    CHECK(chi.coeff(0) == PadicScalar::from_value(b2("0100001011"), 10, p2));

    // forward propagation through the Jacobian: all coefficients at O(2^10),
    // but the image lattice hides 7 diffused digits
    PMatrix jac = charpoly_jacobian(n);
    auto fwd = propagate_forward(jac, std::vector<long>(16, 10));
    CHECK(fwd.output_prec == std::vector<long>{10, 10, 10, 10});
    CHECK(diffused_digits(fwd.image) == 7);
}

TEST_CASE("charpoly Jacobian of M: optimal precisions and Hermite form") {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2);
    PMatrix jac = charpoly_jacobian(m);
    // columns ascending (1, X, X^2, X^3): optimal precisions (15, 12, 10, 10)
    auto fwd = propagate_forward(jac, std::vector<long>(16, 10));
    CHECK(fwd.output_prec == std::vector<long>{15, 12, 10, 10});
    // the Hermite form of the Jacobian lattice is diagonal (1, 1, 2^2, 2^5)
    // in the paper's descending order; ascending coordinates reverse it
    HermiteResult h = hermite_nf_rect(jac);
    std::vector<long> diag = h.diag_vals;
    std::sort(diag.begin(), diag.end());
    CHECK(diag == std::vector<long>{0, 0, 2, 5});
    // diagonal: no diffused digits
    CHECK(diffused_digits(fwd.image) == 0);
}

TEST_CASE("charpoly Jacobian: finite differences") {
    PrimeContext p2(2);
    std::mt19937_64 rng(101);
    PMatrix m(3, 3, p2);
    for (long i = 0; i < 3; ++i) {
        for (long j = 0; j < 3; ++j) {
            m.at(i, j) = PadicScalar::from_value(
                2 * static_cast<long>(rng() % 500) + 1, 30, p2);
        }
    }
    PMatrix jac = charpoly_jacobian(m);
    auto chi0 = charpoly_exact(m);
    for (long k = 8; k <= 12; k += 2) {
        for (long i = 0; i < 3; ++i) {
            for (long j = 0; j < 3; ++j) {
                PMatrix pert = m;
                pert.at(i, j) = PadicScalar::from_value(
                    pert.at(i, j).representative() + p2.pow(k), 30, p2);
                auto chi1 = charpoly_exact(pert);
                for (long c = 0; c < 3; ++c) {
                    Rational fd = (chi1[c] - chi0[c]) / Rational(p2.pow(k));
                    Rational diff = fd - jac.at(i * 3 + j, c).to_rational();
                    if (diff != 0) CHECK(*valuation(diff, p2) >= k - 2);
                }
            }
        }
    }
}

TEST_CASE("LU factorization of the fixture: zealous block") {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2);
    LUFactors lu = lu_factor(m);
    // M = LU at the output precisions
    PMatrix prod = pmatrix_mul(lu.L, lu.U);
    for (long i = 0; i < 4; ++i) {
        for (long j = 0; j < 4; ++j) {
            PadicScalar diff = zsub(prod.at(i, j), m.at(i, j));
            CHECK(diff.contains_zero());
        }
    }
    // diagonal of L is exactly 1
    for (long i = 0; i < 4; ++i) CHECK(lu.L.at(i, i).representative() == 1);
    // the resultLU zealous block: values and precisions
    CHECK(lu.L.at(1, 0) == PadicScalar::from_unit(-4, b2("001111"), 2, p2));
    CHECK(lu.L.at(2, 0) == PadicScalar::from_unit(-4, b2("010101"), 2, p2));
    CHECK(lu.L.at(3, 0) == PadicScalar::from_unit(-4, b2("001011"), 2, p2));
    CHECK(lu.L.at(2, 1) == PadicScalar::from_value(b2("100011"), 6, p2));
    CHECK(lu.L.at(3, 1) == PadicScalar::from_value(b2("010101"), 6, p2));
    CHECK(lu.L.at(3, 2) == PadicScalar::from_value(b2("110"), 4, p2));
    // identity factors trivially
    LUFactors id = lu_factor(PMatrix::identity(3, p2));
    for (long i = 0; i < 3; ++i) {
        CHECK(id.L.at(i, i).representative() == 1);
        CHECK(id.U.at(i, i).representative() == 1);
    }
}

TEST_CASE("LU optimal precisions and diffused digits") {
    PrimeContext p2(2);
    PMatrix m = fixtures::matrix_m(p2);
    PMatrix jac = lu_jacobian(m);
    auto fwd = propagate_forward(jac, std::vector<long>(16, 10));
    // columns (2,1),(3,1),(3,2),(4,1),(4,2),(4,3)
    CHECK(fwd.output_prec == std::vector<long>{2, 2, 9, 2, 10, 7});
    CHECK(diffused_digits(fwd.image) == 9);
}

TEST_CASE("LU differential: finite differences") {
    PrimeContext p2(2);
    const long k = 10;
    LUFactors base = lu_factor(fixtures::matrix_m(p2, 60));
    for (long i = 0; i < 4; ++i) {
        for (long j = 0; j < 4; ++j) {
            PMatrix dm(4, 4, p2);
            dm.at(i, j) = PadicScalar::exact_integer(1, p2);
            LUDifferential diff = lu_differential(fixtures::matrix_m(p2, 60), dm, 40);
            PMatrix pert = fixtures::matrix_m(p2, 60);
            pert.at(i, j) = PadicScalar::from_value(
                pert.at(i, j).representative() + p2.pow(k), 60, p2);
            LUFactors shifted = lu_factor(pert);
            for (long a = 1; a < 4; ++a) {
                for (long b = 0; b < a; ++b) {
                    Rational fd = (shifted.L.at(a, b).to_rational() -
                                   base.L.at(a, b).to_rational()) /
                                  Rational(p2.pow(k));
                    Rational dd = fd - diff.dL.at(a, b).to_rational();
                    if (dd != 0) CHECK(*valuation(dd, p2) >= k - 9);
                }
            }
        }
    }
}

TEST_CASE("Bezout of the fixture pair") {
    PrimeContext p2(2);
    PPolynomial P = fixtures::bezout_p(p2), Q = fixtures::bezout_q(p2);
    // plain extended Euclid in zealous arithmetic: every coefficient is left
    // with at most 6 relative digits
    BezoutPair z = bezout(P, Q);
    CHECK(z.u.degree() == 3);
    CHECK(z.v.degree() == 3);
    for (const auto& poly : {z.u, z.v}) {
        for (long k = 0; k <= poly.degree(); ++k) {
            const PadicScalar& c = poly.coeff(k);
            CHECK(!c.is_exact());
            CHECK(c.rel_precision() <= 6);
        }
    }
    // U P + V Q = 1 at the working precision
    auto check_identity = [&](const BezoutPair& pair) {
        std::vector<PadicScalar> acc(8, PadicScalar::exact_zero(p2));
        for (long a = 0; a <= pair.u.degree(); ++a) {
            for (long b = 0; b <= P.degree(); ++b) {
                acc[a + b] = zadd(acc[a + b], zmul(pair.u.coeff(a), P.coeff(b)));
            }
        }
        for (long a = 0; a <= pair.v.degree(); ++a) {
            for (long b = 0; b <= Q.degree(); ++b) {
                acc[a + b] = zadd(acc[a + b], zmul(pair.v.coeff(a), Q.coeff(b)));
            }
        }
        CHECK(zsub(acc[0], PadicScalar::exact_integer(1, p2)).contains_zero());
        for (std::size_t kk = 1; kk < acc.size(); ++kk) CHECK(acc[kk].contains_zero());
    };
    check_identity(z);
    // boosted reference reaches O(2^10) on every coefficient
    BezoutPair ref = bezout_boosted(P, Q, 40);
    const long uref[4] = {b2("0010001011"), b2("1101110100"), b2("0100101100"),
                          b2("0011101100")};
    const long vref[4] = {b2("0001100101"), b2("0110111100"), b2("1011100100"),
                          b2("1100010100")};
    for (long k = 0; k < 4; ++k) {
        CHECK(ref.u.coeff(k) == PadicScalar::from_value(uref[k], 10, p2));
        CHECK(ref.v.coeff(k) == PadicScalar::from_value(vref[k], 10, p2));
    }
    // trivial pair: Q = 1
    PPolynomial one(std::vector<PadicScalar>{PadicScalar::exact_integer(1, p2)}, p2);
    BezoutPair t = bezout(P, one);
    CHECK(t.u.degree() == 0);
    CHECK(t.u.coeff(0).is_exact_zero());
    CHECK(t.v.coeff(0) == PadicScalar::exact_integer(1, p2));
}

TEST_CASE("Bezout Jacobian: precisions and diffused digits") {
    PrimeContext p2(2);
    PPolynomial P = fixtures::bezout_p(p2), Q = fixtures::bezout_q(p2);
    PMatrix jac = bezout_jacobian(P, Q);
    // every coefficient of U and V is optimal at O(2^10)
    auto fwd = propagate_forward(jac, std::vector<long>(8, 10));
    CHECK(fwd.output_prec == std::vector<long>(8, 10));
    // dU and dV parts separately have no diffused digits
    for (int part = 0; part < 2; ++part) {
        std::vector<PadicScalar> es;
        for (long i = 0; i < 8; ++i) {
            for (long c = 0; c < 4; ++c) es.push_back(jac.at(i, part * 4 + c));
        }
        PMatrix sub = PMatrix::from_entries(8, 4, std::move(es));
        HermiteResult h = hermite_nf_rect(sub);
        CHECK(diffused_digits(PrecisionLattice(h.form)) == 0);
    }
    // the image lies in the hyperplane du3 + dv3 = 0
    for (long i = 0; i < 8; ++i) {
        PadicScalar s = zadd(jac.at(i, 3), jac.at(i, 7));
        CHECK(s.contains_zero());
    }
    // hyperplane-restricted diffused digits: the worked example's count uses
    // the perturbation set complementary to (0, X^3); the full image differs
    // by the valuation of the kernel's top coefficient
    CHECK(bezout_hyperplane_diffused(jac, /*full_image=*/false) == 16);
    CHECK(bezout_hyperplane_diffused(jac, /*full_image=*/true) == 14);
}

TEST_CASE("Bezout differential: finite differences") {
    PrimeContext p2(2);
    PPolynomial P = fixtures::bezout_p(p2, 40), Q = fixtures::bezout_q(p2, 40);
    BezoutPair uv = bezout(P, Q);
    const long k = 10;
    auto to_rat = [&](const PPolynomial& f, long deg) {
        std::vector<Rational> out;
        for (long c = 0; c <= deg; ++c) {
            out.push_back(c <= f.degree() ? f.coeff(c).to_rational() : Rational(0));
        }
        return out;
    };
    for (long which = 0; which < 2; ++which) {
        for (long c = 0; c < 4; ++c) {
            std::vector<PadicScalar> basis(c + 1, PadicScalar::exact_zero(p2));
            basis[c] = PadicScalar::exact_integer(1, p2);
            std::vector<PadicScalar> zero{PadicScalar::exact_zero(p2)};
            PPolynomial dp(which == 0 ? basis : zero, p2);
            PPolynomial dq(which == 0 ? zero : basis, p2);
            BezoutDifferential diff = bezout_differential(P, Q, uv.u, uv.v, dp, dq);
            // perturb and recompute
            std::vector<PadicScalar> pc = P.coeffs(), qc = Q.coeffs();
            if (which == 0) {
                pc[c] = zadd(pc[c], PadicScalar::exact_shifted(k, 1, p2));
            } else {
                qc[c] = zadd(qc[c], PadicScalar::exact_shifted(k, 1, p2));
            }
            BezoutPair shifted = bezout(PPolynomial(pc, p2), PPolynomial(qc, p2));
            auto u0 = to_rat(uv.u, 3), u1 = to_rat(shifted.u, 3), du = to_rat(diff.du, 3);
            for (long t = 0; t < 4; ++t) {
                Rational fd = (u1[t] - u0[t]) / Rational(p2.pow(k));
                Rational dd = fd - du[t];
                if (dd != 0) CHECK(*valuation(dd, p2) >= k - 4);
            }
        }
    }
}

TEST_CASE("evaluation/interpolation round trips") {
    PrimeContext p2(2);
    // exact rationals: identity up to degree 25
    std::mt19937_64 rng(55);
    for (long d : {5L, 12L, 25L}) {
        std::vector<PadicScalar> cs;
        for (long k = 0; k <= d; ++k) {
            cs.push_back(PadicScalar::exact_integer(
                static_cast<long>(rng() % 2000) - 1000, p2));
        }
        PPolynomial P(cs, p2);
        auto vals = evaluate_at_first_integers_exact(P);
        auto back = interpolate_divided_differences_exact(vals);
        for (long k = 0; k <= d; ++k) CHECK(back[k] == P.coeff(k).to_rational());
    }

    // the degree-8 fixture through zealous arithmetic: the constant term
    // survives at full precision, the top coefficient keeps 3 digits
    PPolynomial p8 = fixtures::poly_deg8(p2);
    auto vals = evaluate_at_first_integers(p8);
    PPolynomial back = interpolate_divided_differences(vals, p2);
    CHECK(back.coeff(0) == p8.coeff(0));
    CHECK(back.coeff(0).abs_precision() == 10);
    CHECK(back.coeff(8).abs_precision() == 3);  // 10 - val(8!) = 3
    // every recovered coefficient is consistent with the input
    for (long k = 0; k <= 8; ++k) {
        PadicScalar diff = zsub(back.coeff(k), p8.coeff(k));
        CHECK(diff.contains_zero());
    }

    // float round trip: the constant term keeps its 10 low digits
    PFloatSystem sys(p2, 10);
    auto fvals = evaluate_at_first_integers_pfloat(p8, sys);
    auto fback = interpolate_divided_differences_pfloat(fvals, sys);
    Rational c0 = to_scalar(fback[0], sys).to_rational();
    CHECK(digit_agreement(p8.coeff(0).to_rational(), c0, 10, p2) >= 10);
}

TEST_CASE("Vandermonde diffused digits") {
    PrimeContext p2(2);
    // two independent routes: the Legendre sum and the lattice computation
    CHECK(vandermonde_diffused_digits(19, p2) == 150);
    const long d = 19;
    std::vector<PadicScalar> es;
    for (long k = 0; k <= d; ++k) {
        for (long point = 0; point <= d; ++point) {
            mpz_class pw;
            mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(point),
                          static_cast<unsigned long>(k));
            es.push_back(PadicScalar::exact_integer(pw, p2));
        }
    }
    PMatrix vdm = PMatrix::from_entries(d + 1, d + 1, std::move(es));
    PrecisionLattice lat(vdm, 400);
    CHECK(diffused_digits(lat) == 150);
}

TEST_CASE("Hilbert experiment") {
    PrimeContext p2(2);
    PFloatSystem sys(p2, 53);
    // the exact inverse formula: top-left of H_4^{-1} is 16
    CHECK(hilbert_inverse_entry(4, 1, 1) == 16);
    CHECK(hilbert_inverse_entry(2, 1, 1) == 4);
    CHECK(hilbert_inverse_entry(2, 1, 2) == -6);
    CHECK(hilbert_inverse_entry(2, 2, 2) == 12);
    // n = 2 inverts exactly: all 53 digits correct
    HilbertOutcome h2 = hilbert_experiment(2, sys);
    CHECK(h2.min_correct_digits == 53);
    // n = 13: average correct digits >= 48 (the paper reports 51)
    HilbertOutcome h13 = hilbert_experiment(13, sys);
    CHECK(h13.average_correct_digits >= 48.0);
}

TEST_CASE("Somos (1,1,1,1)") {
    PrimeContext p2(2);
    std::array<mpz_class, 4> seeds{1, 1, 1, 1};
    auto exact = somos_exact_terms(seeds, 54);
    CHECK(exact[4] == 2);
    CHECK(exact[5] == 3);
    CHECK(exact[6] == 7);
    CHECK(exact[7] == 23);
    CHECK(exact[8] == 59);
    CHECK(exact[9] == 314);

    auto oracle = somos(seeds, 50, SomosMode::rational_oracle, p2, 10);
    REQUIRE(oracle.value.has_value());
    CHECK(oracle.value->representative() == 26);
    CHECK(print_digits_padded(*oracle.value) == "...0000011010");

    // naive zealous fails exactly at u_54
    auto z54 = somos(seeds, 54, SomosMode::naive_zealous, p2, 10);
    CHECK(z54.failed_at == 54);
    auto z53 = somos(seeds, 53, SomosMode::naive_zealous, p2, 10);
    CHECK(!z53.failed_at.has_value());

    // naive lazy: u_50 at O(2^10) demands 19 digits of u_1
    auto lz = somos(seeds, 50, SomosMode::naive_lazy, p2, 10);
    REQUIRE(lz.value.has_value());
    CHECK(lz.value->representative() == 26);
    CHECK(lz.seed_demand[0] == 19);
    long maxdemand = *std::max_element(lz.seed_demand.begin(), lz.seed_demand.end());
    CHECK(maxdemand == 19);

    // stabilized zealous returns the oracle value
    auto st = somos(seeds, 50, SomosMode::stabilized_zealous, p2, 10);
    REQUIRE(st.value.has_value());
    CHECK(!st.precision_error);
    CHECK(st.value->representative() == 26);
    CHECK(st.value->abs_precision() == 10);

    // stabilized lazy matches too
    auto sl = somos(seeds, 50, SomosMode::stabilized_lazy, p2, 10);
    REQUIRE(sl.value.has_value());
    CHECK(sl.value->representative() == 26);
}

TEST_CASE("Somos (1,1,1,3)") {
    PrimeContext p2(2);
    std::array<mpz_class, 4> seeds{1, 1, 1, 3};
    auto exact = somos_exact_terms(seeds, 19);
    // u_15 is divisible by 2^10
    CHECK(*valuation(exact[14], p2) == 10);
    CHECK(rational_mod_pow(exact[18], 10, p2) == 7);

    auto oracle = somos(seeds, 19, SomosMode::rational_oracle, p2, 10);
    CHECK(oracle.value->representative() == 7);
    CHECK(print_digits_padded(*oracle.value) == "...0000000111");

    // u_15 vanishes at O(2^10): both naive backends crash at u_19
    auto z = somos(seeds, 19, SomosMode::naive_zealous, p2, 10);
    CHECK(z.failed_at == 19);
    auto f = somos(seeds, 19, SomosMode::naive_pfloat, p2, 10);
    CHECK(f.failed_at == 19);

    // naive lazy demands 23 digits of u_1
    auto lz = somos(seeds, 19, SomosMode::naive_lazy, p2, 10);
    REQUIRE(lz.value.has_value());
    CHECK(lz.value->representative() == 7);
    CHECK(lz.seed_demand[0] == 23);
    long maxdemand = *std::max_element(lz.seed_demand.begin(), lz.seed_demand.end());
    CHECK(maxdemand == 23);

    // stabilized zealous: PrecisionError at N = 10, succeeds at N = 11
    auto st10 = somos(seeds, 19, SomosMode::stabilized_zealous, p2, 10);
    CHECK(st10.precision_error);
    auto st11 = somos(seeds, 19, SomosMode::stabilized_zealous, p2, 11);
    REQUIRE(st11.value.has_value());
    CHECK(rational_mod_pow(st11.value->to_rational(), 10, p2) == 7);

    // stabilized lazy mirrors the oracle value whenever it does not raise
    auto sl11 = somos(seeds, 19, SomosMode::stabilized_lazy, p2, 11);
    REQUIRE(sl11.value.has_value());
    CHECK(rational_mod_pow(sl11.value->to_rational(), 10, p2) == 7);
}

TEST_CASE("Somos window lemma") {
    // any four consecutive terms contain at most one non-unit
    std::mt19937_64 rng(61);
    for (long prime : {2L, 3L}) {
        PrimeContext ctx(prime);
        for (int t = 0; t < 500; ++t) {
            std::array<mpz_class, 4> seeds;
            for (auto& s : seeds) {
                mpz_class v = static_cast<unsigned long>(rng() % 100) + 1;
                while (mpz_divisible_p(v.get_mpz_t(), ctx.prime().get_mpz_t())) v += 1;
                s = v;
            }
            auto u = somos_exact_terms(seeds, 60);
            for (std::size_t i = 0; i + 4 <= u.size(); ++i) {
                int nonunits = 0;
                for (std::size_t j = i; j < i + 4; ++j) {
                    if (*valuation(u[j], ctx) != 0) ++nonunits;
                }
                CHECK(nonunits <= 1);
            }
        }
    }
}

TEST_CASE("Somos Jacobian determinant identity") {
    PrimeContext p2(2);
    std::array<mpz_class, 4> seeds{1, 1, 1, 3};
    auto u = somos_exact_terms(seeds, 20);
    for (long i = 1; i <= 10; ++i) {
        PMatrix jac = somos_jacobian(seeds, i, p2, 30);
        // det J(phi_i) = u_{i+1} u_{i+2} u_{i+3} u_{i+4} / (a b c d)
        Rational expect = u[i] * u[i + 1] * u[i + 2] * u[i + 3] /
                          (u[0] * u[1] * u[2] * u[3]);
        Rational got = det_exact(jac);
        Rational diff = got - expect;
        if (diff != 0) CHECK(*valuation(diff, p2) >= 25);
    }
    // finite differences against the chain-rule Jacobian
    const long k = 9;
    PMatrix jac = somos_jacobian(seeds, 10, p2, 30);
    auto base = somos_exact_terms(seeds, 14);
    for (int s = 0; s < 4; ++s) {
        std::array<mpz_class, 4> pert = seeds;
        pert[s] += p2.pow(k).get_si();
        auto shifted = somos_exact_terms(pert, 14);
        for (int c = 0; c < 4; ++c) {
            Rational fd = (shifted[10 + c] - base[10 + c]) / Rational(p2.pow(k));
            Rational dd = fd - jac.at(s, c).to_rational();
            if (dd != 0) CHECK(*valuation(dd, p2) >= k - 2);
        }
    }
}

TEST_CASE("Somos step Jacobian fixture at (1,1,1,3)") {
    PrimeContext p2(2);
    std::array<mpz_class, 4> seeds{1, 1, 1, 3};
    PMatrix jac = somos_jacobian(seeds, 14, p2, 12);
    // det has valuation 10, matching the 10 diffused digits of the window
    PrecisionLattice lat(jac);
    CHECK(lat.det_valuation() == 10);
    CHECK(diffused_digits(lat) == 10);
    // Hermite normal form [[1,0,0,179],[0,1,0,369],[0,0,1,818],[0,0,0,2^10]]
    HermiteResult h = lat.hermite();
    CHECK(h.diag_vals == std::vector<long>{0, 0, 0, 10});
    CHECK(h.form.at(0, 3).representative() == 179);
    CHECK(h.form.at(1, 3).representative() == 369);
    CHECK(h.form.at(2, 3).representative() == 818);
    // the precision lemma hypothesis holds for all N > v(i)
    PrecisionLattice H = PrecisionLattice::diagonal({11, 11, 11, 11}, p2);
    CHECK(preclemma_poly_check(jac, H, -11));
}

TEST_CASE("adaptive driver on simple chains") {
    PrimeContext p2(2);
    // identity steps: input truncated to the target
    StepChain chain;
    chain.steps.push_back(
        {[](const std::vector<PadicScalar>& s) {
             return StepPlan{{20}, PrecisionLattice::diagonal({8}, s[0].context())};
         },
         [](const std::vector<PadicScalar>& s) { return s; }});
    chain.final_prec = {8};
    auto out = run_adaptive(chain, {PadicScalar::from_value(13, 12, p2)});
    CHECK(out[0] == PadicScalar::from_value(13, 8, p2));

    // square root as a chain of zero-lift Newton steps reproduces the
    // worked example's 19-digit output: step i certifies 2^i + 1 digits, so
    // lifting the input to 2^i + 2 digits (capped by the 20 known digits of
    // c) is enough precision
    PadicScalar c = fixtures::sqrt_input(p2);
    StepChain newton;
    for (long i = 1; i <= 5; ++i) {
        long cert = (1L << i) + 1;
        newton.steps.push_back(
            {[cert, p2](const std::vector<PadicScalar>&) {
                 return StepPlan{{std::min(cert + 1, 20L)},
                                 PrecisionLattice::diagonal({std::min(cert, 19L)}, p2)};
             },
             [c, p2](const std::vector<PadicScalar>& s) {
                 PadicScalar next =
                     zdiv(zadd(s[0], zdiv(c, s[0])), PadicScalar::exact_integer(2, p2));
                 return std::vector<PadicScalar>{next};
             }});
    }
    newton.final_prec = {19};
    auto root = run_adaptive(newton, {PadicScalar::from_value(1, 20, p2)});
    CHECK(root[0].representative() == 357461);
    CHECK(root[0].abs_precision() == 19);
}
