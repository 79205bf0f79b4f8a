#pragma once

#include "padlab/core.hpp"
#include "padlab/zealous.hpp"

namespace padlab {

/// Rectangular matrix of scalars sharing one prime context.
class PMatrix {
public:
    PMatrix(long rows, long cols, const PrimeContext& ctx);
    static PMatrix identity(long d, const PrimeContext& ctx);
    /// Entries in row-major order.
    static PMatrix from_entries(long rows, long cols, std::vector<PadicScalar> entries);

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    const PrimeContext& context() const { return ctx_; }

    const PadicScalar& at(long i, long j) const;
    PadicScalar& at(long i, long j);

    PMatrix transpose() const;
    void swap_rows(long i, long j);

    /// Text format: rows separated by ';', entries by ',', core literals.
    static PMatrix parse(const std::string& text, const PrimeContext& ctx);
    std::string print(PrintStyle style) const;

private:
    long rows_, cols_;
    std::vector<PadicScalar> data_;
    PrimeContext ctx_;
};

PMatrix pmatrix_mul(const PMatrix& a, const PMatrix& b);

/// Matrix inverse. Exact integer-or-shift entries invert exactly through the
/// adjugate; otherwise zealous Gaussian elimination with smallest-valuation
/// pivoting. Throws PrecisionInsufficient when no pivot is visible.
PMatrix pmatrix_inverse(const PMatrix& m);

struct HermiteResult {
    PMatrix form;             // upper triangular, diagonal p^{n_j} exact
    std::vector<long> diag_vals;
};

/// p-adic Hermite normal form (row-span preserving, pivot = smallest
/// valuation then lowest row). Square input. All-exact inputs are coerced to
/// `exact_prec` digits so unit normalizations stay representable.
HermiteResult hermite_nf(const PMatrix& m, long exact_prec = 256);

/// Echelonization of an n x m matrix of full column rank (n >= m); returns
/// the m x m Hermite form of the row span.
HermiteResult hermite_nf_rect(const PMatrix& m, long exact_prec = 256);

struct SmithResult {
    std::vector<PadicScalar> diag;  // valuations ascending
    int det_sign;                   // +-1 from the row/column swaps
};

/// Diagonalization M = P diag Q with det(P), det(Q) = +-1, pivoting on the
/// globally smallest valuation; no precision is lost relative to the input.
SmithResult smith_diagonalize(const PMatrix& m);

/// Full-rank module over Zp inside Qp^d, stored as a square generator
/// matrix (rows span). The Hermite form is computed at construction.
class PrecisionLattice {
public:
    explicit PrecisionLattice(PMatrix generators, long exact_prec = 256);
    static PrecisionLattice diagonal(const std::vector<long>& exponents,
                                     const PrimeContext& ctx);

    long dim() const { return gens_.rows(); }
    const PMatrix& generators() const { return gens_; }
    const HermiteResult& hermite() const { return *herm_; }
    const PrimeContext& context() const { return gens_.context(); }

    /// val(det), read off the Hermite diagonal.
    long det_valuation() const;
    /// Smallest valuation a lattice vector can have in coordinate j.
    long column_min_valuation(long j) const;
    /// Membership test by back-substitution against the Hermite form.
    bool contains_vector(const std::vector<PadicScalar>& v) const;

private:
    PMatrix gens_;
    std::shared_ptr<const HermiteResult> herm_;
};

/// log_p of the index of L inside the smallest diagonal lattice containing
/// it; zero iff the Hermite form is diagonal.
long diffused_digits(const PrecisionLattice& L);

/// Dual lattice, spanned by the rows of the transposed inverse.
PrecisionLattice dual_lattice(const PrecisionLattice& L);

struct ForwardPrecision {
    std::vector<long> output_prec;  // M_j per output coordinate
    PrecisionLattice image;         // d(phi)(H) for diffused-digit analysis
};

/// Zealous direction: A = diag(p^{N_i}) J; M_j is the smallest valuation in
/// column j (SurjectivityFailure when a column has no visible entry).
ForwardPrecision propagate_forward(const PMatrix& jac, const std::vector<long>& input_prec);

/// Lazy direction: N_i = -(smallest valuation in row i of J diag(p^{-M_j}));
/// nullopt marks rows with no visible entry ("unneeded" inputs).
std::vector<std::optional<long>> propagate_backward(const PMatrix& jac,
                                                    const std::vector<long>& target_prec);

/// For a polynomial map with p-integral coefficients at a p-integral point:
/// checks H inside B(p^r_exp) and B(p^(1+2 r_exp)) inside dphi(H).
bool preclemma_poly_check(const PMatrix& jac_at_v, const PrecisionLattice& H, long r_exp);

}  // namespace padlab
