#pragma once

#include "padlab/core.hpp"
#include "padlab/relaxed.hpp"
#include "padlab/zealous.hpp"

namespace padlab {

/// Dense polynomial over PadicScalar, coefficients in ascending degree.
class PPolynomial {
public:
    PPolynomial(std::vector<PadicScalar> coeffs, PrimeContext ctx);

    const PrimeContext& context() const { return ctx_; }
    long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
    const std::vector<PadicScalar>& coeffs() const { return coeffs_; }
    const PadicScalar& coeff(long k) const;

    PPolynomial derivative() const;
    PadicScalar evaluate(const PadicScalar& x) const;  // Horner, zealous ops

private:
    std::vector<PadicScalar> coeffs_;
    PrimeContext ctx_;
};

/// Hensel lifting of an approximate root a with |f(a)| < |f'(a)|^2 to a
/// root modulo p^N. Iterates x <- x - f(x)/f'(x), zero-filling unspecified
/// digits, until the certified digit count reaches N.
PadicScalar hensel_lift(const PPolynomial& f, const PadicScalar& a, long target_prec);

/// Inverse of a unit by the recurrence x <- 2x - c x^2 (quadratic
/// convergence; |c x_i - 1| <= p^-2^i).
PadicScalar newton_inverse(const PadicScalar& c, long target_prec);
LazyNumber newton_inverse(const LazyNumber& c);

/// Simple matrix-of-representatives inverse mod p^N via X <- 2X - XCX,
/// seeded by Gaussian elimination over F_p. Entries of C must be p-integral;
/// throws DomainError when C mod p is singular. Returned entries carry O(p^N).
std::vector<std::vector<PadicScalar>> newton_matrix_inverse(
    const std::vector<std::vector<PadicScalar>>& C, long target_prec);

enum class SqrtVariant {
    naive_zealous,  // plain interval Newton; at p = 2 loses a digit per step
    zero_lift,      // zero-fills unknown digits each iteration
};

/// Square root of c (val(c) even; c' a square unit). For p = 2 requires
/// c' = 1 mod 8. Output precision follows the variant.
PadicScalar padic_sqrt(const PadicScalar& c, SqrtVariant variant);

/// Square root of u modulo p (p odd): exhaustive below 2^16, Tonelli-Shanks
/// above. Throws NotASquare.
mpz_class sqrt_mod_p(const mpz_class& u, const PrimeContext& ctx);

}  // namespace padlab
