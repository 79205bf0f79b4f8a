#pragma once

#include <array>
#include <functional>

#include "padlab/core.hpp"
#include "padlab/lattice.hpp"
#include "padlab/newton.hpp"
#include "padlab/pfloat.hpp"
#include "padlab/relaxed.hpp"
#include "padlab/zealous.hpp"

namespace padlab {

// ---------------------------------------------------------------------------
// Fixtures: the worked 2-adic instances, entries modulo 2^10
// ---------------------------------------------------------------------------

namespace fixtures {

/// The running 4x4 example matrix (a product P diag(1,4,8,32) Q of unimodular
/// factors; all entries known at O(2^10) unless another precision is asked).
PMatrix matrix_m(const PrimeContext& p2, long prec = 10);

/// The coprime monic quartics of the Bezout experiment.
PPolynomial bezout_p(const PrimeContext& p2, long prec = 10);
PPolynomial bezout_q(const PrimeContext& p2, long prec = 10);

/// The degree-8 and degree-19 evaluation/interpolation polynomials.
PPolynomial poly_deg8(const PrimeContext& p2, long prec = 10);
PPolynomial poly_deg19(const PrimeContext& p2, long prec = 10);

/// The square-root input 1 + 2^3 + 2^4 + 2^5 + 2^10 + 2^13 + 2^16 + 2^17 +
/// 2^18 + 2^19 + O(2^20).
PadicScalar sqrt_input(const PrimeContext& p2);

}  // namespace fixtures

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct ReportRow {
    std::string id;
    std::string backend;
    std::string value;      // digit style
    std::string precision;  // claimed precision, "O(p^N)" or "exact"
    std::string reference;  // empty when none
    long agreeing_digits;   // -1 when not measured
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::string to_tsv() const;
};

/// Count of agreeing base-p digits starting at the reference's valuation;
/// a wrong valuation counts as zero. `limit` caps the count (e.g. the float
/// significand length).
long digit_agreement(const Rational& reference, const Rational& computed, long limit,
                     const PrimeContext& ctx);

// ---------------------------------------------------------------------------
// Determinant and characteristic polynomial
// ---------------------------------------------------------------------------

/// Division-free determinant (Bird's iteration) in zealous arithmetic.
PadicScalar det_division_free(const PMatrix& m);
/// Same division-free scheme over p-adic floats (entries rounded).
PFloat det_division_free_pfloat(const PMatrix& m, const PFloatSystem& sys);
/// Exact determinant of the canonical representatives.
Rational det_exact(const PMatrix& m);

/// Determinant at optimal precision via the Smith-style diagonalization.
PadicScalar det_optimal(const PMatrix& m);

/// Comatrix column (d^2 x 1 Jacobian of det), entries computed from
/// representatives lifted to `internal_prec` extra digits.
PMatrix det_jacobian(const PMatrix& m, long internal_prec = 40);
/// d^2 x d Jacobian of M -> charpoly(M) - X^d (row (i,j) holds the
/// coefficients of (-1)^{i+j} det(X I - M)_{i,j}, ascending degree).
PMatrix charpoly_jacobian(const PMatrix& m, long internal_prec = 40);

/// Monic characteristic polynomial det(X I - M) by the division-free
/// determinant over the polynomial ring.
PPolynomial charpoly(const PMatrix& m);
std::vector<PFloat> charpoly_pfloat(const PMatrix& m, const PFloatSystem& sys);
std::vector<Rational> charpoly_exact(const PMatrix& m);

// ---------------------------------------------------------------------------
// LU factorization
// ---------------------------------------------------------------------------

struct LUFactors {
    PMatrix L, U;
};

/// Gaussian elimination by column operations (scale the pivot column, then
/// clear the pivot row), zealous arithmetic. Throws InexactZeroDivision on a
/// vanishing principal minor.
LUFactors lu_factor(const PMatrix& m);
LUFactors lu_factor_pfloat(const PMatrix& m, const PFloatSystem& sys);

struct LUDifferential {
    PMatrix dL, dU;
};

/// dL = L Lo(L^-1 dM U^-1), dU = Up(L^-1 dM U^-1) U, computed at boosted
/// internal precision.
LUDifferential lu_differential(const PMatrix& m, const PMatrix& dm, long internal_prec = 40);

/// d^2 x d(d-1)/2 Jacobian of the L-part, columns indexed by the strictly
/// lower positions (2,1),(3,1),(3,2),(4,1),... row-major in (i,j).
PMatrix lu_jacobian(const PMatrix& m, long internal_prec = 40);

// ---------------------------------------------------------------------------
// Bezout coefficients
// ---------------------------------------------------------------------------

struct BezoutPair {
    PPolynomial u, v;
};

/// Plain extended Euclid (no optimization), zealous arithmetic.
BezoutPair bezout(const PPolynomial& p, const PPolynomial& q);
/// Reference route: rerun at precision N + boost on the representatives and
/// truncate to the input precision (exact-rational in the inputs).
BezoutPair bezout_boosted(const PPolynomial& p, const PPolynomial& q, long boost = 40);

struct BezoutDifferential {
    PPolynomial du, dv;
};

/// dU = U dR mod Q, dV = V dR mod P with dR = -U dP - V dQ.
BezoutDifferential bezout_differential(const PPolynomial& p, const PPolynomial& q,
                                       const PPolynomial& u, const PPolynomial& v,
                                       const PPolynomial& dp, const PPolynomial& dq);

/// 2d x 2d Jacobian of (P~, Q~) -> (U, V), rows = basis perturbations
/// (dP = X^k then dQ = X^k, ascending k), columns = (U coeffs, V coeffs)
/// ascending degree; computed at boosted precision.
PMatrix bezout_jacobian(const PPolynomial& p, const PPolynomial& q, long internal_prec = 40);

/// Diffused digits of the (U,V) image inside the hyperplane of opposite
/// top coefficients (coordinates dU plus the non-top dV coefficients).
/// `full_image` uses all 2d perturbation directions; otherwise the set
/// complementary to the (0, X^{d-1}) direction is used, which is the
/// variant the worked example tabulates.
long bezout_hyperplane_diffused(const PMatrix& jac, bool full_image);

// ---------------------------------------------------------------------------
// Evaluation / interpolation at 0..d
// ---------------------------------------------------------------------------

std::vector<PadicScalar> evaluate_at_first_integers(const PPolynomial& p);
PPolynomial interpolate_divided_differences(const std::vector<PadicScalar>& values,
                                            const PrimeContext& ctx);
std::vector<PFloat> evaluate_at_first_integers_pfloat(const PPolynomial& p,
                                                      const PFloatSystem& sys);
std::vector<PFloat> interpolate_divided_differences_pfloat(const std::vector<PFloat>& values,
                                                           const PFloatSystem& sys);
std::vector<Rational> evaluate_at_first_integers_exact(const PPolynomial& p);
std::vector<Rational> interpolate_divided_differences_exact(const std::vector<Rational>& values);

/// Number of diffused digits of the Vandermonde image lattice at degree d
/// (evaluation points 0..d), equal to val_p(1! 2! ... d!).
long vandermonde_diffused_digits(long d, const PrimeContext& ctx);

// ---------------------------------------------------------------------------
// Hilbert matrix experiment
// ---------------------------------------------------------------------------

/// Exact entry of H_n^{-1} (integral).
mpz_class hilbert_inverse_entry(long n, long i, long j);

struct HilbertOutcome {
    long n;
    double average_correct_digits;
    long min_correct_digits;
    ExperimentReport report;
};

/// Builds H_n over p-adic floats, inverts by Gaussian elimination with
/// smallest-valuation pivoting, and compares to the exact inverse.
HilbertOutcome hilbert_experiment(long n, const PFloatSystem& sys);

// ---------------------------------------------------------------------------
// Somos 4
// ---------------------------------------------------------------------------

enum class SomosMode {
    rational_oracle,
    naive_zealous,
    naive_pfloat,
    naive_lazy,
    stabilized_zealous,
    stabilized_lazy,
};

SomosMode somos_mode_from_string(const std::string& name);
std::string to_string(SomosMode mode);

struct SomosOutcome {
    std::optional<PadicScalar> value;  // u_n at O(p^N) when the run finished
    std::optional<Rational> exact;     // rational-oracle only
    std::optional<long> failed_at;     // index of the term that broke the run
    bool precision_error = false;      // stabilized modes
    std::array<long, 4> seed_demand{{0, 0, 0, 0}};  // naive_lazy digit requests
    std::vector<std::pair<long, std::string>> table;  // per-term digit strings
};

SomosOutcome somos(const std::array<mpz_class, 4>& seeds, long n, SomosMode mode,
                   const PrimeContext& ctx, long N);

/// Jacobian of the i-fold Somos step at the given (unit) seeds, computed by
/// the chain rule over exact rationals and reduced to precision `prec`.
PMatrix somos_jacobian(const std::array<mpz_class, 4>& seeds, long steps,
                       const PrimeContext& ctx, long prec);

/// Exact terms u_1..u_n of the sequence.
std::vector<Rational> somos_exact_terms(const std::array<mpz_class, 4>& seeds, long n);

// ---------------------------------------------------------------------------
// Adaptive-precision driver
// ---------------------------------------------------------------------------

struct StepPlan {
    std::vector<long> lift_exponents;  // zero-fill each coordinate to O(p^e)
    PrecisionLattice h_min;            // the step's output must reach this
};

struct AdaptiveStep {
    /// Inspects the incoming state; may throw PrecisionError when the input
    /// precision cannot support the step.
    std::function<StepPlan(const std::vector<PadicScalar>&)> plan;
    std::function<std::vector<PadicScalar>(const std::vector<PadicScalar>&)> eval;
};

struct StepChain {
    std::vector<AdaptiveStep> steps;
    std::vector<long> final_prec;  // truncation exponents of H_{n,max}
};

/// Per step: lift (zero-fill) the state per the plan, evaluate, and check
/// that the zealous output precision reaches H_{i,min} (LiftPolicyFailure
/// otherwise); finally truncate to the chain's output precision.
std::vector<PadicScalar> run_adaptive(const StepChain& chain, std::vector<PadicScalar> state);

// ---------------------------------------------------------------------------
// Experiment reports (golden-file backed)
// ---------------------------------------------------------------------------

ExperimentReport det_experiment(long prec, long float_prec);
ExperimentReport charpoly_experiment(long prec, long float_prec);
ExperimentReport lu_experiment(long prec, long float_prec);
ExperimentReport bezout_experiment(long prec, long float_prec);
ExperimentReport interp_experiment(long prec, long float_prec);
ExperimentReport somos_experiment(const std::array<mpz_class, 4>& seeds, long n, long prec);

}  // namespace padlab
