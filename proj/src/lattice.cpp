#include "padlab/lattice.hpp"

#include <algorithm>
#include <sstream>

namespace padlab {

// ---------------------------------------------------------------------------
// PMatrix
// ---------------------------------------------------------------------------

PMatrix::PMatrix(long rows, long cols, const PrimeContext& ctx)
    : rows_(rows), cols_(cols), data_(), ctx_(ctx) {
    if (rows < 1 || cols < 1) throw DomainError("PMatrix: empty dimensions");
    data_.assign(static_cast<std::size_t>(rows * cols), PadicScalar::exact_zero(ctx));
}

PMatrix PMatrix::identity(long d, const PrimeContext& ctx) {
    PMatrix m(d, d, ctx);
    for (long i = 0; i < d; ++i) m.at(i, i) = PadicScalar::exact_integer(1, ctx);
    return m;
}

PMatrix PMatrix::from_entries(long rows, long cols, std::vector<PadicScalar> entries) {
    if (entries.empty() || static_cast<long>(entries.size()) != rows * cols) {
        throw DomainError("PMatrix::from_entries: size mismatch");
    }
    PMatrix m(rows, cols, entries[0].context());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (entries[k].context() != m.ctx_) throw DomainError("PMatrix: prime mismatch");
        m.data_[k] = std::move(entries[k]);
    }
    return m;
}

const PadicScalar& PMatrix::at(long i, long j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
}
PadicScalar& PMatrix::at(long i, long j) {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
}

PMatrix PMatrix::transpose() const {
    PMatrix t(cols_, rows_, ctx_);
    for (long i = 0; i < rows_; ++i) {
        for (long j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    }
    return t;
}

void PMatrix::swap_rows(long i, long j) {
    if (i == j) return;
    for (long c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

PMatrix PMatrix::parse(const std::string& text, const PrimeContext& ctx) {
    std::vector<std::vector<PadicScalar>> rows;
    std::stringstream ss(text);
    std::string rowtext;
    while (std::getline(ss, rowtext, ';')) {
        if (rowtext.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::vector<PadicScalar> row;
        std::stringstream rs(rowtext);
        std::string cell;
        while (std::getline(rs, cell, ',')) row.push_back(parse_scalar(cell, ctx));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("PMatrix::parse: no rows", 0);
    const std::size_t cols = rows[0].size();
    std::vector<PadicScalar> flat;
    for (auto& r : rows) {
        if (r.size() != cols) throw ParseError("PMatrix::parse: ragged rows", 0);
        for (auto& e : r) flat.push_back(std::move(e));
    }
    return from_entries(static_cast<long>(rows.size()), static_cast<long>(cols),
                        std::move(flat));
}

std::string PMatrix::print(PrintStyle style) const {
    std::ostringstream os;
    for (long i = 0; i < rows_; ++i) {
        if (i) os << ";\n";
        for (long j = 0; j < cols_; ++j) {
            if (j) os << ", ";
            os << print_scalar(at(i, j), style);
        }
    }
    return os.str();
}

PMatrix pmatrix_mul(const PMatrix& a, const PMatrix& b) {
    if (a.cols() != b.rows()) throw DomainError("pmatrix_mul: shape mismatch");
    PMatrix r(a.rows(), b.cols(), a.context());
    for (long i = 0; i < a.rows(); ++i) {
        for (long j = 0; j < b.cols(); ++j) {
            PadicScalar acc = zmul(a.at(i, 0), b.at(0, j));
            for (long k = 1; k < a.cols(); ++k) {
                acc = zadd(acc, zmul(a.at(i, k), b.at(k, j)));
            }
            r.at(i, j) = acc;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

namespace {

bool all_exact(const PMatrix& m) {
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            if (!m.at(i, j).is_exact()) return false;
        }
    }
    return true;
}

PMatrix coerce_exact_entries(const PMatrix& m, long prec) {
    PMatrix out = m;
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            const PadicScalar& e = out.at(i, j);
            if (e.is_exact() && !e.is_exact_zero()) out.at(i, j) = lift_zero_fill(e, prec);
        }
    }
    return out;
}

// visible valuation: nullopt when the entry is indistinguishable from zero
std::optional<long> visible_val(const PadicScalar& x) {
    if (x.contains_zero()) return std::nullopt;
    return *x.valuation();
}

// exact rational determinant of an exact matrix
Rational exact_det(const PMatrix& m) {
    const long d = m.rows();
    std::vector<std::vector<Rational>> w(d, std::vector<Rational>(d));
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) w[i][j] = m.at(i, j).to_rational();
    }
    Rational det = 1;
    for (long k = 0; k < d; ++k) {
        long piv = -1;
        for (long i = k; i < d; ++i) {
            if (w[i][k] != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) return Rational(0);
        if (piv != k) {
            std::swap(w[piv], w[k]);
            det = -det;
        }
        det *= w[k][k];
        for (long i = k + 1; i < d; ++i) {
            Rational f = w[i][k] / w[k][k];
            for (long j = k; j < d; ++j) w[i][j] -= f * w[k][j];
        }
    }
    return det;
}

// q = a / u with a fallback to finite precision when the exact quotient is
// not representable
PadicScalar safe_div(const PadicScalar& a, const PadicScalar& u, long cap) {
    if (a.is_exact() && u.is_exact() && !a.is_exact_zero()) {
        mpz_class q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.unit_part().get_mpz_t(),
                    u.unit_part().get_mpz_t());
        if (r != 0) return zdiv(truncate(a, cap + a.valuation_or(0)), u);
    }
    return zdiv(a, u);
}

// residue of `a` modulo p^nj (digits of `a` in positions [min(val,nj), nj))
// plus the exact-or-inexact quotient; `determined` reports whether the
// residue is fully known at the available precision
struct PivotReduction {
    PadicScalar r, q;
    bool determined;
};

PivotReduction reduce_mod_pivot(const PadicScalar& a, long nj) {
    const PrimeContext& ctx = a.context();
    if (a.is_exact_zero()) {
        return {a, PadicScalar::exact_zero(ctx), true};
    }
    if (!a.is_exact() && a.abs_precision() < nj) {
        // not enough digits to know the canonical residue; leave in place
        return {a, PadicScalar::exact_zero(ctx), false};
    }
    if (!a.is_exact() && a.contains_zero()) {
        // all known digits vanish and abs >= nj: residue is exactly 0, but
        // the quotient keeps the entry's uncertainty
        return {PadicScalar::exact_zero(ctx),
                PadicScalar::inexact_zero(a.abs_precision() - nj, ctx), true};
    }
    long v = a.is_exact() ? a.unit_valuation() : *a.valuation();
    long lo = std::min(v, nj);
    mpz_class scaled = a.unit_part() * ctx.pow(v - lo);
    mpz_class m = ctx.pow(nj - lo);
    mpz_class rs;
    mpz_fdiv_r(rs.get_mpz_t(), scaled.get_mpz_t(), m.get_mpz_t());
    PadicScalar r = PadicScalar::exact_shifted(lo, rs, ctx);
    mpz_class qs = (scaled - rs) / m;  // exact
    PadicScalar q =
        a.is_exact() ? PadicScalar::exact_shifted(0, qs, ctx)
                     : PadicScalar::from_value(qs, a.abs_precision() - nj, ctx);
    return {r, q, true};
}

}  // namespace

// ---------------------------------------------------------------------------
// Hermite normal form
// ---------------------------------------------------------------------------

namespace {

HermiteResult hermite_impl(PMatrix w, long exact_prec) {
    const long n = w.rows(), m = w.cols();
    const PrimeContext& ctx = w.context();
    if (all_exact(w)) w = coerce_exact_entries(w, exact_prec);
    long cap = 0;
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < m; ++j) {
            if (!w.at(i, j).is_exact()) cap = std::max(cap, w.at(i, j).abs_precision());
        }
    }
    cap += kExactCoercionHeadroom;

    std::vector<long> diag;
    for (long k = 0; k < m; ++k) {
        // pivot: smallest visible valuation in column k among rows k..n-1
        long piv = -1, best = 0;
        long zero_floor = -1;
        for (long i = k; i < n; ++i) {
            const PadicScalar& e = w.at(i, k);
            if (e.is_exact_zero()) continue;
            auto v = visible_val(e);
            if (!v) {
                long a = e.abs_precision();
                zero_floor = zero_floor < 0 ? a : std::min(zero_floor, a);
                continue;
            }
            if (piv < 0 || *v < best) {
                piv = i;
                best = *v;
            }
        }
        if (piv < 0 || (zero_floor >= 0 && zero_floor < best)) {
            throw PrecisionInsufficient("hermite_nf: pivot for column " + std::to_string(k) +
                                        " is indistinguishable from 0");
        }
        w.swap_rows(k, piv);
        // normalize: divide the row by the pivot's unit part
        const PadicScalar& e = w.at(k, k);
        PadicScalar unit = e.is_exact()
                               ? PadicScalar::exact_shifted(0, e.unit_part(), ctx)
                               : PadicScalar::from_unit(0, e.unit_part(),
                                                        e.abs_precision() - best, ctx);
        for (long j = k + 1; j < m; ++j) w.at(k, j) = safe_div(w.at(k, j), unit, cap);
        w.at(k, k) = PadicScalar::exact_shifted(best, 1, ctx);
        diag.push_back(best);
        // clear below
        for (long i = k + 1; i < n; ++i) {
            const PadicScalar& x = w.at(i, k);
            if (x.is_exact_zero()) continue;
            // q = x / p^best, an exact digit shift
            PadicScalar q =
                x.is_exact()
                    ? PadicScalar::exact_shifted(x.unit_valuation() - best, x.unit_part(), ctx)
                    : PadicScalar::from_unit(x.unit_valuation() - best, x.unit_part(),
                                             x.abs_precision() - best, ctx);
            for (long j = k + 1; j < m; ++j) {
                w.at(i, j) = zsub(w.at(i, j), zmul(q, w.at(k, j)));
            }
            w.at(i, k) = PadicScalar::exact_zero(ctx);
        }
    }

    // upper cleanup: reduce entries above each pivot modulo p^{n_j}
    for (long j = 1; j < m; ++j) {
        for (long i = 0; i < j; ++i) {
            auto red = reduce_mod_pivot(w.at(i, j), diag[j]);
            if (!red.determined) continue;
            if (!red.q.is_exact_zero()) {
                for (long jj = j + 1; jj < m; ++jj) {
                    w.at(i, jj) = zsub(w.at(i, jj), zmul(red.q, w.at(j, jj)));
                }
            }
            w.at(i, j) = red.r;
        }
    }

    // keep the top m x m block (rows m..n-1 are cleared)
    if (n == m) return {std::move(w), std::move(diag)};
    PMatrix top(m, m, ctx);
    for (long i = 0; i < m; ++i) {
        for (long j = 0; j < m; ++j) top.at(i, j) = w.at(i, j);
    }
    return {std::move(top), std::move(diag)};
}

}  // namespace

HermiteResult hermite_nf(const PMatrix& m, long exact_prec) {
    if (m.rows() != m.cols()) throw DomainError("hermite_nf: matrix must be square");
    return hermite_impl(m, exact_prec);
}

HermiteResult hermite_nf_rect(const PMatrix& m, long exact_prec) {
    if (m.rows() < m.cols()) throw DomainError("hermite_nf_rect: need rows >= cols");
    return hermite_impl(m, exact_prec);
}

// ---------------------------------------------------------------------------
// Smith diagonalization
// ---------------------------------------------------------------------------

SmithResult smith_diagonalize(const PMatrix& m) {
    if (m.rows() != m.cols()) throw DomainError("smith_diagonalize: matrix must be square");
    const long d = m.rows();
    const PrimeContext& ctx = m.context();
    PMatrix w = m;
    long cap = 0;
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            if (!w.at(i, j).is_exact()) cap = std::max(cap, w.at(i, j).abs_precision());
        }
    }
    cap = (cap == 0 ? 256 : cap) + kExactCoercionHeadroom;

    int sign = 1;
    std::vector<PadicScalar> diag;
    for (long k = 0; k < d; ++k) {
        // pivot: smallest visible valuation over the whole remaining block
        long pi = -1, pj = -1, best = 0;
        bool any_nonexact_zero = false;
        for (long i = k; i < d; ++i) {
            for (long j = k; j < d; ++j) {
                const PadicScalar& e = w.at(i, j);
                if (e.is_exact_zero()) continue;
                any_nonexact_zero = true;
                auto v = visible_val(e);
                if (!v) continue;
                if (pi < 0 || *v < best) {
                    pi = i;
                    pj = j;
                    best = *v;
                }
            }
        }
        if (pi < 0) {
            if (any_nonexact_zero) {
                throw PrecisionInsufficient(
                    "smith_diagonalize: remaining block indistinguishable from 0");
            }
            // exactly singular: the rest of the diagonal is exactly zero
            for (long i = k; i < d; ++i) diag.push_back(PadicScalar::exact_zero(ctx));
            return {std::move(diag), sign};
        }
        if (pi != k) {
            w.swap_rows(k, pi);
            sign = -sign;
        }
        if (pj != k) {
            for (long i = 0; i < d; ++i) std::swap(w.at(i, k), w.at(i, pj));
            sign = -sign;
        }
        const PadicScalar piv = w.at(k, k);
        for (long i = k + 1; i < d; ++i) {
            if (w.at(i, k).is_exact_zero()) continue;
            PadicScalar q = safe_div(w.at(i, k), piv, cap);
            for (long j = k + 1; j < d; ++j) {
                w.at(i, j) = zsub(w.at(i, j), zmul(q, w.at(k, j)));
            }
            w.at(i, k) = PadicScalar::exact_zero(ctx);
        }
        for (long j = k + 1; j < d; ++j) {
            if (w.at(k, j).is_exact_zero()) continue;
            PadicScalar q = safe_div(w.at(k, j), piv, cap);
            for (long i = k + 1; i < d; ++i) {
                w.at(i, j) = zsub(w.at(i, j), zmul(q, w.at(i, k)));
            }
            w.at(k, j) = PadicScalar::exact_zero(ctx);
        }
        diag.push_back(piv);
    }
    return {std::move(diag), sign};
}

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

PMatrix pmatrix_inverse(const PMatrix& m) {
    if (m.rows() != m.cols()) throw DomainError("pmatrix_inverse: matrix must be square");
    const long d = m.rows();
    const PrimeContext& ctx = m.context();
    PMatrix w = all_exact(m) ? coerce_exact_entries(m, 256) : m;
    // augmented [w | I], smallest-valuation pivoting
    std::vector<std::vector<PadicScalar>> aug(
        d, std::vector<PadicScalar>(2 * d, PadicScalar::exact_zero(ctx)));
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) aug[i][j] = w.at(i, j);
        aug[i][d + i] = PadicScalar::exact_integer(1, ctx);
    }
    for (long k = 0; k < d; ++k) {
        long piv = -1;
        long best = 0;
        for (long i = k; i < d; ++i) {
            auto v = visible_val(aug[i][k]);
            if (v && (piv < 0 || *v < best)) {
                piv = i;
                best = *v;
            }
        }
        if (piv < 0) throw PrecisionInsufficient("pmatrix_inverse: no visible pivot");
        std::swap(aug[k], aug[piv]);
        PadicScalar pivval = aug[k][k];
        for (long j = 0; j < 2 * d; ++j) aug[k][j] = zdiv(aug[k][j], pivval);
        for (long i = 0; i < d; ++i) {
            if (i == k || aug[i][k].is_exact_zero()) continue;
            PadicScalar f = aug[i][k];
            for (long j = 0; j < 2 * d; ++j) {
                aug[i][j] = zsub(aug[i][j], zmul(f, aug[k][j]));
            }
        }
    }
    PMatrix inv(d, d, ctx);
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) inv.at(i, j) = aug[i][d + j];
    }
    return inv;
}

// ---------------------------------------------------------------------------
// PrecisionLattice
// ---------------------------------------------------------------------------

PrecisionLattice::PrecisionLattice(PMatrix generators, long exact_prec)
    : gens_(std::move(generators)) {
    if (gens_.rows() != gens_.cols()) {
        throw DomainError("PrecisionLattice: generator matrix must be square");
    }
    herm_ = std::make_shared<const HermiteResult>(hermite_nf(gens_, exact_prec));
}

PrecisionLattice PrecisionLattice::diagonal(const std::vector<long>& exponents,
                                            const PrimeContext& ctx) {
    const long d = static_cast<long>(exponents.size());
    PMatrix g(d, d, ctx);
    for (long i = 0; i < d; ++i) g.at(i, i) = PadicScalar::exact_shifted(exponents[i], 1, ctx);
    return PrecisionLattice(std::move(g));
}

long PrecisionLattice::det_valuation() const {
    long s = 0;
    for (long v : herm_->diag_vals) s += v;
    return s;
}

long PrecisionLattice::column_min_valuation(long j) const {
    std::optional<long> best;
    std::optional<long> zero_floor;
    for (long i = 0; i < gens_.rows(); ++i) {
        const PadicScalar& e = gens_.at(i, j);
        if (e.is_exact_zero()) continue;
        if (e.contains_zero()) {
            long a = e.abs_precision();
            zero_floor = zero_floor ? std::min(*zero_floor, a) : a;
            continue;
        }
        long v = *e.valuation();
        best = best ? std::min(*best, v) : v;
    }
    if (!best) throw PrecisionInsufficient("column_min_valuation: no visible entry");
    if (zero_floor && *zero_floor < *best) {
        throw PrecisionInsufficient("column_min_valuation: undecidable at this precision");
    }
    return *best;
}

bool PrecisionLattice::contains_vector(const std::vector<PadicScalar>& v) const {
    const long d = dim();
    if (static_cast<long>(v.size()) != d) throw DomainError("contains_vector: dimension");
    const PMatrix& A = herm_->form;
    std::vector<PadicScalar> w = v;
    // rows generate; row j is supported on columns >= j, so coefficients
    // resolve front to back
    for (long j = 0; j < d; ++j) {
        const PadicScalar& wj = w[j];
        long nj = herm_->diag_vals[j];
        std::optional<long> val = wj.is_exact_zero() ? std::nullopt : wj.valuation();
        if (wj.contains_zero()) {
            if (!wj.is_exact() && wj.abs_precision() < nj) {
                throw PrecisionInsufficient("contains_vector: undecidable coordinate");
            }
            continue;  // coefficient 0 (up to working precision)
        }
        if (*val < nj) return false;
        // c = w_j / p^{n_j}; subtract c * (row j of A), which is supported
        // on columns >= j
        PadicScalar c = wj.is_exact()
                            ? PadicScalar::exact_shifted(wj.unit_valuation() - nj,
                                                         wj.unit_part(), gens_.context())
                            : PadicScalar::from_unit(wj.unit_valuation() - nj, wj.unit_part(),
                                                     wj.abs_precision() - nj, gens_.context());
        for (long jj = j; jj < d; ++jj) {
            w[jj] = zsub(w[jj], zmul(c, A.at(j, jj)));
        }
    }
    return true;
}

long diffused_digits(const PrecisionLattice& L) {
    long colsum = 0;
    for (long j = 0; j < L.dim(); ++j) colsum += L.column_min_valuation(j);
    return L.det_valuation() - colsum;
}

PrecisionLattice dual_lattice(const PrecisionLattice& L) {
    const PMatrix& g = L.generators();
    const long d = L.dim();
    const PrimeContext& ctx = g.context();
    if (all_exact(g)) {
        // rows of the transposed inverse span the dual; scaling the basis by
        // the unit part of det does not change the lattice, so the cofactor
        // matrix over p^{val(det)} is an exact generator matrix
        Rational det = exact_det(g);
        if (det == 0) throw DomainError("dual_lattice: singular generators");
        long w = *valuation(det, ctx);
        PMatrix out(d, d, ctx);
        for (long i = 0; i < d; ++i) {
            for (long j = 0; j < d; ++j) {
                // cofactor C_ij = (-1)^{i+j} det(minor_ij)
                std::vector<PadicScalar> ments;
                for (long r = 0; r < d; ++r) {
                    for (long c = 0; c < d; ++c) {
                        if (r != i && c != j) ments.push_back(g.at(r, c));
                    }
                }
                Rational cof = d == 1 ? Rational(1)
                                      : exact_det(PMatrix::from_entries(d - 1, d - 1, ments));
                if ((i + j) % 2) cof = -cof;
                Rational entry = cof;
                if (w >= 0) {
                    entry /= Rational(ctx.pow(w));
                } else {
                    entry *= Rational(ctx.pow(-w));
                }
                out.at(i, j) = PadicScalar::exact_rational(entry, ctx);
            }
        }
        return PrecisionLattice(std::move(out));
    }
    PMatrix inv = pmatrix_inverse(g);
    return PrecisionLattice(inv.transpose());
}

// ---------------------------------------------------------------------------
// Precision propagation
// ---------------------------------------------------------------------------

ForwardPrecision propagate_forward(const PMatrix& jac, const std::vector<long>& input_prec) {
    const long n = jac.rows(), m = jac.cols();
    if (static_cast<long>(input_prec.size()) != n) {
        throw DomainError("propagate_forward: precision vector size mismatch");
    }
    const PrimeContext& ctx = jac.context();
    PMatrix A = jac;
    for (long i = 0; i < n; ++i) {
        PadicScalar scale = PadicScalar::exact_shifted(input_prec[i], 1, ctx);
        for (long j = 0; j < m; ++j) A.at(i, j) = zmul(scale, A.at(i, j));
    }
    std::vector<long> out(m);
    for (long j = 0; j < m; ++j) {
        std::optional<long> best;
        for (long i = 0; i < n; ++i) {
            auto v = visible_val(A.at(i, j));
            if (v) best = best ? std::min(*best, *v) : *v;
        }
        if (!best) {
            throw SurjectivityFailure("propagate_forward: column " + std::to_string(j) +
                                          " vanishes at working precision",
                                      j);
        }
        out[j] = *best;
    }
    if (n < m) throw DomainError("propagate_forward: wide Jacobians not supported");
    HermiteResult h = n == m ? hermite_nf(A) : hermite_nf_rect(A);
    return {std::move(out), PrecisionLattice(std::move(h.form))};
}

std::vector<std::optional<long>> propagate_backward(const PMatrix& jac,
                                                    const std::vector<long>& target_prec) {
    const long n = jac.rows(), m = jac.cols();
    if (static_cast<long>(target_prec.size()) != m) {
        throw DomainError("propagate_backward: precision vector size mismatch");
    }
    const PrimeContext& ctx = jac.context();
    std::vector<std::optional<long>> out(n);
    for (long i = 0; i < n; ++i) {
        std::optional<long> best;
        for (long j = 0; j < m; ++j) {
            PadicScalar e = zmul(jac.at(i, j), PadicScalar::exact_shifted(-target_prec[j], 1, ctx));
            auto v = visible_val(e);
            if (v) best = best ? std::min(*best, *v) : *v;
        }
        if (best) out[i] = -*best;
    }
    return out;
}

bool preclemma_poly_check(const PMatrix& jac_at_v, const PrecisionLattice& H, long r_exp) {
    const long n = jac_at_v.rows(), m = jac_at_v.cols();
    if (H.dim() != n) throw DomainError("preclemma_poly_check: dimension mismatch");
    // H inside B_E(p^{r_exp}) = p^{-r_exp} Zp^n: all coordinates have
    // valuation >= -r_exp
    for (long j = 0; j < n; ++j) {
        if (H.column_min_valuation(j) < -r_exp) return false;
    }
    // image lattice d(phi)(H): rows of G * J
    PMatrix img = pmatrix_mul(H.generators(), jac_at_v);
    HermiteResult h = n == m ? hermite_nf(img) : hermite_nf_rect(img);
    PrecisionLattice image(std::move(h.form));
    // B_F(p^{1+2 r_exp}) = p^{-(1+2 r_exp)} Zp^m inside the image
    const PrimeContext& ctx = jac_at_v.context();
    long e = -(1 + 2 * r_exp);
    for (long j = 0; j < m; ++j) {
        std::vector<PadicScalar> basis(m, PadicScalar::exact_zero(ctx));
        basis[j] = PadicScalar::exact_shifted(e, 1, ctx);
        if (!image.contains_vector(basis)) return false;
    }
    return true;
}

}  // namespace padlab
