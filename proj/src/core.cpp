#include "padlab/core.hpp"

#include <cctype>
#include <sstream>

namespace padlab {

namespace {

bool is_prime_trial_division(const mpz_class& p) {
    if (p < 2) return false;
    if (p == 2) return true;
    if (p % 2 == 0) return false;
    mpz_class d = 3;
    while (d * d <= p) {
        if (p % d == 0) return false;
        d += 2;
    }
    return true;
}

}  // namespace

PrimeContext::PrimeContext(mpz_class p, long val_cap) : p_(std::move(p)), val_cap_(val_cap) {
    if (!is_prime_trial_division(p_)) {
        throw DomainError("PrimeContext: p = " + p_.get_str() + " is not prime");
    }
    if (val_cap_ < 1) throw DomainError("PrimeContext: val_cap must be >= 1");
}

mpz_class PrimeContext::pow(long k) const {
    if (k < 0) throw DomainError("PrimeContext::pow: negative exponent");
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), p_.get_mpz_t(), static_cast<unsigned long>(k));
    return r;
}

std::vector<mpz_class> to_base_p(const mpz_class& n, const PrimeContext& ctx) {
    if (n < 0) throw DomainError("to_base_p: negative input");
    std::vector<mpz_class> digits;
    mpz_class rest = n;
    while (rest != 0) {
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(), ctx.prime().get_mpz_t());
        digits.push_back(r);
        rest = q;
    }
    return digits;
}

std::optional<long> valuation(const mpz_class& n, const PrimeContext& ctx) {
    if (n == 0) return std::nullopt;
    mpz_class rest = abs(n);
    long v = 0;
    while (mpz_divisible_p(rest.get_mpz_t(), ctx.prime().get_mpz_t())) {
        rest /= ctx.prime();
        ++v;
    }
    return v;
}

mpz_class legendre_factorial_valuation(const mpz_class& n, const PrimeContext& ctx) {
    if (n < 0) throw DomainError("legendre_factorial_valuation: negative input");
    mpz_class total = 0;
    mpz_class q = n / ctx.prime();
    while (q != 0) {
        total += q;
        q /= ctx.prime();
    }
    return total;
}

std::optional<long> valuation(const Rational& q, const PrimeContext& ctx) {
    if (q == 0) return std::nullopt;
    long vn = *valuation(mpz_class(q.get_num()), ctx);
    long vd = *valuation(mpz_class(q.get_den()), ctx);
    return vn - vd;
}

mpz_class inverse_mod_pow(const mpz_class& a, long N, const PrimeContext& ctx) {
    if (N < 1) throw DomainError("inverse_mod_pow: N must be >= 1");
    mpz_class m = ctx.pow(N);
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
        throw DomainError("inverse_mod_pow: not invertible");
    }
    return r;
}

mpz_class rational_mod_pow(const Rational& q, long N, const PrimeContext& ctx) {
    mpz_class num(q.get_num()), den(q.get_den());
    if (mpz_divisible_p(den.get_mpz_t(), ctx.prime().get_mpz_t())) {
        throw DomainError("rational_mod_pow: denominator divisible by p");
    }
    if (N < 1) throw DomainError("rational_mod_pow: N must be >= 1");
    mpz_class m = ctx.pow(N);
    mpz_class r = num * inverse_mod_pow(den, N, ctx);
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
    return r;
}

// ---------------------------------------------------------------------------
// PadicScalar
// ---------------------------------------------------------------------------

PadicScalar PadicScalar::canonical(bool exact, long v, mpz_class s, long n,
                                   const PrimeContext& ctx) {
    if (exact) {
        if (s == 0) return PadicScalar(true, 0, 0, 0, ctx);
        while (mpz_divisible_p(s.get_mpz_t(), ctx.prime().get_mpz_t())) {
            s /= ctx.prime();
            ++v;
        }
        return PadicScalar(true, v, std::move(s), 0, ctx);
    }
    // inexact: reduce s into [0, p^(N-v)) and strip unit powers of p
    if (v >= n || s == 0) return PadicScalar(false, n, 0, n, ctx);
    mpz_class m = ctx.pow(n - v);
    mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), m.get_mpz_t());
    if (s == 0) return PadicScalar(false, n, 0, n, ctx);
    while (mpz_divisible_p(s.get_mpz_t(), ctx.prime().get_mpz_t())) {
        s /= ctx.prime();
        ++v;
    }
    if (v >= n) return PadicScalar(false, n, 0, n, ctx);
    return PadicScalar(false, v, std::move(s), n, ctx);
}

PadicScalar PadicScalar::exact_integer(mpz_class n, const PrimeContext& ctx) {
    return canonical(true, 0, std::move(n), 0, ctx);
}

PadicScalar PadicScalar::exact_zero(const PrimeContext& ctx) {
    return PadicScalar(true, 0, 0, 0, ctx);
}

PadicScalar PadicScalar::exact_shifted(long v, mpz_class s, const PrimeContext& ctx) {
    return canonical(true, v, std::move(s), 0, ctx);
}

PadicScalar PadicScalar::inexact_zero(long N, const PrimeContext& ctx) {
    return PadicScalar(false, N, 0, N, ctx);
}

PadicScalar PadicScalar::from_value(const mpz_class& a, long N, const PrimeContext& ctx) {
    return canonical(false, 0, a, N, ctx);
}

PadicScalar PadicScalar::from_unit(long v, mpz_class s, long N, const PrimeContext& ctx) {
    return canonical(false, v, std::move(s), N, ctx);
}

PadicScalar PadicScalar::from_rational(const Rational& q, long N, const PrimeContext& ctx) {
    if (q == 0) return inexact_zero(N, ctx);
    long v = *valuation(q, ctx);
    if (v >= N) return inexact_zero(N, ctx);
    Rational unit = q;
    if (v >= 0) {
        unit /= Rational(ctx.pow(v));
    } else {
        unit *= Rational(ctx.pow(-v));
    }
    mpz_class s = rational_mod_pow(unit, N - v, ctx);
    return from_unit(v, std::move(s), N, ctx);
}

PadicScalar PadicScalar::exact_rational(const Rational& q, const PrimeContext& ctx) {
    if (q == 0) return exact_zero(ctx);
    long v = *valuation(q, ctx);
    Rational unit = q;
    if (v >= 0) {
        unit /= Rational(ctx.pow(v));
    } else {
        unit *= Rational(ctx.pow(-v));
    }
    if (unit.get_den() != 1) {
        throw DomainError("exact_rational: value is not an integer shifted by a power of p");
    }
    return exact_shifted(v, mpz_class(unit.get_num()), ctx);
}

long PadicScalar::abs_precision() const {
    if (exact_) throw DomainError("abs_precision: value is exact");
    return n_;
}

std::optional<long> PadicScalar::valuation() const {
    if (is_exact_zero()) return std::nullopt;
    if (is_inexact_zero()) return n_;
    return v_;
}

long PadicScalar::valuation_or(long fallback) const {
    auto v = valuation();
    return v ? *v : fallback;
}

long PadicScalar::rel_precision() const {
    if (exact_) throw DomainError("rel_precision: value is exact");
    return s_ == 0 ? 0 : n_ - v_;
}

Rational PadicScalar::to_rational() const {
    if (s_ == 0) return Rational(0);
    Rational r(s_);
    if (v_ >= 0) {
        r *= Rational(ctx_.pow(v_));
    } else {
        r /= Rational(ctx_.pow(-v_));
    }
    return r;
}

mpz_class PadicScalar::representative() const {
    if (s_ == 0) return 0;
    if (v_ < 0) throw DomainError("representative: negative valuation");
    return s_ * ctx_.pow(v_);
}

bool PadicScalar::operator==(const PadicScalar& o) const {
    if (ctx_ != o.ctx_ || exact_ != o.exact_) return false;
    if (exact_) return v_ == o.v_ && s_ == o.s_;
    return n_ == o.n_ && v_ == o.v_ && s_ == o.s_;
}

PadicScalar scalar_add(const PadicScalar& a, const PadicScalar& b) {
    if (!a.is_exact() || !b.is_exact()) throw DomainError("scalar_add: operands must be exact");
    if (a.ctx_ != b.ctx_) throw DomainError("scalar_add: prime mismatch");
    long w = std::min(a.v_, b.v_);
    mpz_class sum = a.s_ * a.ctx_.pow(a.v_ - w) + b.s_ * b.ctx_.pow(b.v_ - w);
    return PadicScalar::exact_shifted(w, std::move(sum), a.ctx_);
}

PadicScalar scalar_mul(const PadicScalar& a, const PadicScalar& b) {
    if (!a.is_exact() || !b.is_exact()) throw DomainError("scalar_mul: operands must be exact");
    if (a.ctx_ != b.ctx_) throw DomainError("scalar_mul: prime mismatch");
    if (a.s_ == 0 || b.s_ == 0) return PadicScalar::exact_zero(a.ctx_);
    return PadicScalar::exact_shifted(a.v_ + b.v_, a.s_ * b.s_, a.ctx_);
}

PadicScalar scalar_neg(const PadicScalar& a) {
    if (!a.is_exact()) throw DomainError("scalar_neg: operand must be exact");
    return PadicScalar::exact_shifted(a.v_, -a.s_, a.ctx_);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// digit of p^v * s at position q (digit 0 of s sits at position v)
mpz_class digit_at(const mpz_class& s, long v, long q, const PrimeContext& ctx) {
    if (q < v) return 0;
    mpz_class t = s / ctx.pow(q - v);
    mpz_class d;
    mpz_fdiv_r(d.get_mpz_t(), t.get_mpz_t(), ctx.prime().get_mpz_t());
    return d;
}

// positions [lo, hi) of p^v * s, MSB-first
std::string render_positions(const mpz_class& s, long v, long lo, long hi,
                             const PrimeContext& ctx) {
    bool wide = ctx.prime() > 10;
    std::string out;
    for (long pos = hi - 1; pos >= lo; --pos) {
        if (!out.empty() && wide) out += '|';
        out += digit_at(s, v, pos, ctx).get_str();
    }
    return out;
}

}  // namespace

std::string print_scalar(const PadicScalar& x, PrintStyle style,
                         std::optional<long> negative_width) {
    const PrimeContext& ctx = x.context();
    const std::string p = ctx.prime().get_str();
    if (style == PrintStyle::arithmetic) {
        if (x.is_exact_zero()) return "0";
        std::ostringstream os;
        if (x.is_inexact_zero()) {
            os << "0 + O(" << p << "^" << x.abs_precision() << ")";
            return os.str();
        }
        os << x.unit_part().get_str();
        if (x.unit_valuation() != 0) os << " * " << p << "^" << x.unit_valuation();
        if (!x.is_exact()) os << " + O(" << p << "^" << x.abs_precision() << ")";
        return os.str();
    }

    // digit style
    if (x.is_exact_zero()) return "0";
    if (x.is_inexact_zero()) {
        long n = x.abs_precision();
        if (n <= 0) return "... * " + p + "^" + std::to_string(n);
        std::string out = "...";
        bool wide = ctx.prime() > 10;
        for (long i = 0; i < n; ++i) {
            if (i && wide) out += '|';
            out += '0';
        }
        return out;
    }
    if (x.is_exact() && x.unit_part() < 0) {
        if (x.unit_valuation() < 0) throw DomainError("print_scalar: negative value with v < 0");
        if (!negative_width) {
            throw DomainError("print_scalar: digit style for exact negatives needs a width");
        }
        long w = *negative_width;
        mpz_class rep = x.unit_part() * ctx.pow(x.unit_valuation());
        mpz_class mod = ctx.pow(w);
        mpz_fdiv_r(rep.get_mpz_t(), rep.get_mpz_t(), mod.get_mpz_t());
        return render_positions(rep, 0, 0, w, ctx);
    }

    long v = x.unit_valuation();
    long hi = x.is_exact() ? v + static_cast<long>(to_base_p(abs(x.unit_part()), ctx).size())
                           : x.abs_precision();
    const mpz_class& s = x.unit_part();
    if (x.is_exact()) {
        // exact values print their digits down to position min(v, 0), with a
        // radix point when fractional digits exist
        if (v >= 0) return render_positions(s, v, 0, hi, ctx);
        std::string ipart = hi > 0 ? render_positions(s, v, 0, hi, ctx) : "0";
        std::string fpart = render_positions(s, v, v, 0, ctx);
        return ipart + "." + fpart;
    }
    // inexact: the rel(x) known digits, positions v..N-1
    if (v >= 0) {
        std::string out = "..." + render_positions(s, v, v, hi, ctx);
        if (v > 0) out += " * " + p + "^" + std::to_string(v);
        return out;
    }
    if (hi <= 0) {
        return "..." + render_positions(s, v, v, hi, ctx) + " * " + p + "^" +
               std::to_string(v);
    }
    std::string ipart = render_positions(s, v, 0, hi, ctx);
    std::string fpart = render_positions(s, v, v, 0, ctx);
    return "..." + ipart + "." + fpart;
}

std::string print_digits_padded(const PadicScalar& x) {
    if (x.is_exact()) throw DomainError("print_digits_padded: value must be inexact");
    if (!x.is_inexact_zero() && x.unit_valuation() < 0) {
        throw DomainError("print_digits_padded: negative valuation");
    }
    long n = x.abs_precision();
    if (n < 1) throw DomainError("print_digits_padded: nonpositive precision");
    return "..." + render_positions(x.unit_part(), x.unit_valuation(), 0, n, x.context());
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool eat(const std::string& s) {
        skip_ws();
        if (text.compare(pos, s.size(), s) == 0) {
            pos += s.size();
            return true;
        }
        return false;
    }
    bool peek_digit() {
        skip_ws();
        return pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]));
    }
    mpz_class read_uint() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw ParseError("expected an integer", start);
        return mpz_class(text.substr(start, pos - start));
    }
    long read_int() {
        skip_ws();
        bool neg = eat('-');
        mpz_class u = read_uint();
        if (!u.fits_slong_p()) throw ParseError("exponent out of range", pos);
        long r = u.get_si();
        return neg ? -r : r;
    }
    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    }
    bool done() {
        skip_ws();
        return pos == text.size();
    }
};

// "* p^v" suffix; the uint must equal p
std::optional<long> parse_shift_marker(Cursor& cur, const PrimeContext& ctx) {
    if (!cur.eat('*')) return std::nullopt;
    mpz_class base = cur.read_uint();
    if (base != ctx.prime()) throw ParseError("shift base does not match p", cur.pos);
    cur.expect('^');
    return cur.read_int();
}

PadicScalar parse_digitform(Cursor& cur, const PrimeContext& ctx) {
    bool inexact = cur.eat("...");
    bool wide = ctx.prime() > 10;
    auto read_digits = [&](std::vector<mpz_class>& out) {
        // MSB-first as written
        while (true) {
            if (!cur.peek_digit()) break;
            if (wide) {
                mpz_class d = cur.read_uint();
                if (d >= ctx.prime()) throw ParseError("digit >= p", cur.pos);
                out.push_back(d);
                std::size_t save = cur.pos;
                if (!cur.eat('|')) {
                    cur.pos = save;
                    break;
                }
            } else {
                cur.skip_ws();
                char c = cur.text[cur.pos++];
                mpz_class d(std::string(1, c));
                if (d >= ctx.prime()) throw ParseError("digit >= p", cur.pos);
                out.push_back(d);
            }
        }
        if (out.empty()) throw ParseError("expected base-p digits", cur.pos);
    };
    std::vector<mpz_class> ipart;
    read_digits(ipart);
    std::vector<mpz_class> fpart;
    if (cur.eat('.')) read_digits(fpart);
    long offset = 0;
    if (auto sh = parse_shift_marker(cur, ctx)) {
        if (!fpart.empty()) throw ParseError("shift marker with radix point", cur.pos);
        offset = *sh;
    }
    // value = sum of digits; lowest position = offset - #fpart
    long lo = offset - static_cast<long>(fpart.size());
    mpz_class acc = 0;
    for (const auto& d : ipart) acc = acc * ctx.prime() + d;
    for (const auto& d : fpart) acc = acc * ctx.prime() + d;
    long N = static_cast<long>(ipart.size()) + offset;
    if (!inexact) {
        return PadicScalar::exact_shifted(lo, acc, ctx);
    }
    return PadicScalar::from_unit(lo, std::move(acc), N, ctx);
}

PadicScalar parse_arith(Cursor& cur, const PrimeContext& ctx) {
    bool neg = cur.eat('-');
    mpz_class s = cur.read_uint();
    if (neg) s = -s;
    long v = 0;
    if (auto sh = parse_shift_marker(cur, ctx)) v = *sh;
    std::optional<long> N;
    {
        std::size_t save = cur.pos;
        if (cur.eat('+')) {
            if (!cur.eat("O(")) throw ParseError("expected O(", cur.pos);
            mpz_class base = cur.read_uint();
            if (base != ctx.prime()) throw ParseError("O() base does not match p", cur.pos);
            cur.expect('^');
            N = cur.read_int();
            cur.expect(')');
        } else {
            cur.pos = save;
        }
    }
    if (N) return PadicScalar::from_unit(v, std::move(s), *N, ctx);
    return PadicScalar::exact_shifted(v, std::move(s), ctx);
}

}  // namespace

PadicScalar parse_scalar(const std::string& text, const PrimeContext& ctx) {
    Cursor cur{text};
    cur.skip_ws();
    // Disambiguate: digitform iff the token is made of base-p digits followed
    // by '.', '|', end, or a shift marker, with no '+ O(...)' tail, or starts
    // with "...". Try arith first; on failure or leftover input, try digits.
    if (cur.text.compare(cur.pos, 3, "...") == 0) {
        PadicScalar r = parse_digitform(cur, ctx);
        if (!cur.done()) throw ParseError("trailing input", cur.pos);
        return r;
    }
    {
        Cursor probe{text};
        try {
            PadicScalar r = parse_arith(probe, ctx);
            if (probe.done()) return r;
        } catch (const ParseError&) {
        }
    }
    PadicScalar r = parse_digitform(cur, ctx);
    if (!cur.done()) throw ParseError("trailing input", cur.pos);
    return r;
}

}  // namespace padlab
