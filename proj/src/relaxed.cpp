#include "padlab/relaxed.hpp"

#include <algorithm>
#include <utility>

namespace padlab {

namespace relaxed_detail {

// ---------------------------------------------------------------------------
// Dense polynomials in the carry variable t, little-endian mpz coefficients.
// ---------------------------------------------------------------------------

using Poly = std::vector<mpz_class>;

constexpr std::size_t kKaratsubaThreshold = 32;

void poly_add_into(Poly& a, const Poly& b, std::size_t offset = 0) {
    if (a.size() < b.size() + offset) a.resize(b.size() + offset);
    for (std::size_t i = 0; i < b.size(); ++i) a[i + offset] += b[i];
}

void poly_sub_into(Poly& a, const Poly& b, std::size_t offset) {
    if (a.size() < b.size() + offset) a.resize(b.size() + offset);
    for (std::size_t i = 0; i < b.size(); ++i) a[i + offset] -= b[i];
}

Poly poly_mul(const Poly& a, const Poly& b);

Poly poly_mul_school(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

Poly poly_mul_karatsuba(const Poly& a, const Poly& b) {
    std::size_t h = std::max(a.size(), b.size()) / 2;
    Poly a0(a.begin(), a.begin() + std::min(h, a.size()));
    Poly a1(a.begin() + std::min(h, a.size()), a.end());
    Poly b0(b.begin(), b.begin() + std::min(h, b.size()));
    Poly b1(b.begin() + std::min(h, b.size()), b.end());
    if (a1.empty() || b1.empty()) {
        // grossly unbalanced; fall back
        return poly_mul_school(a, b);
    }
    Poly z0 = poly_mul(a0, b0);
    Poly z2 = poly_mul(a1, b1);
    poly_add_into(a0, a1);
    poly_add_into(b0, b1);
    Poly z1 = poly_mul(a0, b0);
    Poly r(a.size() + b.size() - 1);
    poly_add_into(r, z0);
    poly_add_into(r, z2, 2 * h);
    poly_add_into(r, z1, h);
    poly_sub_into(r, z0, h);
    poly_sub_into(r, z2, h);
    return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    if (std::min(a.size(), b.size()) < kKaratsubaThreshold) return poly_mul_school(a, b);
    return poly_mul_karatsuba(a, b);
}

// ---------------------------------------------------------------------------
// Nodes
// ---------------------------------------------------------------------------

struct Node {
    PrimeContext ctx;
    long p;  // the prime as a machine word
    std::vector<long> digits;

    explicit Node(const PrimeContext& c) : ctx(c) {
        if (!c.prime().fits_slong_p()) {
            throw DomainError("relaxed arithmetic requires p to fit a machine word");
        }
        p = c.prime().get_si();
    }
    virtual ~Node() = default;

    virtual void produce_next() = 0;

    virtual long digit(long n) {
        if (n < 0) throw DomainError("digit index must be >= 0");
        while (static_cast<long>(digits.size()) <= n) produce_next();
        return digits[n];
    }
};

struct ConstantNode final : Node {
    mpz_class rest;
    ConstantNode(mpz_class value, const PrimeContext& c) : Node(c), rest(std::move(value)) {}
    void produce_next() override {
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(), ctx.prime().get_mpz_t());
        digits.push_back(r.get_si());
        rest = q;
    }
};

struct AddNode final : Node {
    std::shared_ptr<Node> x, y;
    long carry = 0;
    AddNode(std::shared_ptr<Node> a, std::shared_ptr<Node> b, const PrimeContext& c)
        : Node(c), x(std::move(a)), y(std::move(b)) {}
    void produce_next() override {
        long n = static_cast<long>(digits.size());
        long s = x->digit(n) + y->digit(n) + carry;
        digits.push_back(s % p);
        carry = s / p;
    }
};

struct SubNode final : Node {
    std::shared_ptr<Node> x, y;
    long borrow = 0;
    SubNode(std::shared_ptr<Node> a, std::shared_ptr<Node> b, const PrimeContext& c)
        : Node(c), x(std::move(a)), y(std::move(b)) {}
    void produce_next() override {
        long n = static_cast<long>(digits.size());
        long s = x->digit(n) - y->digit(n) - borrow;
        if (s < 0) {
            s += p;
            borrow = 1;
        } else {
            borrow = 0;
        }
        digits.push_back(s);
    }
};

struct ShiftNode final : Node {
    std::shared_ptr<Node> x;
    long k;  // multiply by p^k; negative k divides exactly
    ShiftNode(std::shared_ptr<Node> a, long shift, const PrimeContext& c)
        : Node(c), x(std::move(a)), k(shift) {}
    void produce_next() override {
        long n = static_cast<long>(digits.size());
        if (k >= 0) {
            digits.push_back(n < k ? 0 : x->digit(n - k));
        } else {
            if (n == 0) {
                for (long i = 0; i < -k; ++i) {
                    if (x->digit(i) != 0) {
                        throw DomainError("lazy_shift: inexact division by a power of p");
                    }
                }
            }
            digits.push_back(x->digit(n - k));
        }
    }
};

// Relaxed multiplication: per digit n, walk the paving levels; at level l the
// two squares of size 2^l with corners on the antidiagonal n contribute a
// polynomial product in t. The carry is itself a polynomial in t and only its
// coefficients are ever reduced (its value at p grows too fast to evaluate).
struct MulNode final : Node {
    std::shared_ptr<Node> x, y;
    Poly carry;
    MulProbe* probe;

    MulNode(std::shared_ptr<Node> a, std::shared_ptr<Node> b, const PrimeContext& c,
            MulProbe* pr)
        : Node(c), x(std::move(a)), y(std::move(b)), probe(pr) {}

    Poly block(Node& src, long lo, long hi) {
        Poly out;
        out.reserve(hi - lo + 1);
        for (long i = lo; i <= hi; ++i) out.emplace_back(src.digit(i));
        return out;
    }

    void produce_next() override {
        long n = static_cast<long>(digits.size());
        long m = n + 2;
        long l = 0;
        Poly s;
        while (m > 1) {
            const long w = 1L << l;
            const long lo1 = w - 1, hi1 = 2 * w - 2;
            const long lo2 = (m - 1) * w - 1, hi2 = m * w - 2;
            poly_add_into(s, poly_mul(block(*x, lo1, hi1), block(*y, lo2, hi2)));
            if (probe && probe->record_tiles) probe->tiles.push_back({lo1, lo2, w});
            if (m > 2) {
                poly_add_into(s, poly_mul(block(*y, lo1, hi1), block(*x, lo2, hi2)));
                if (probe && probe->record_tiles) probe->tiles.push_back({lo2, lo1, w});
            }
            if (m % 2 != 0) break;
            m /= 2;
            ++l;
        }
        poly_add_into(s, carry);
        mpz_class s0 = s.empty() ? mpz_class(0) : s[0];
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), s0.get_mpz_t(), ctx.prime().get_mpz_t());
        digits.push_back(r.get_si());
        // carry = s0 div p + s div t
        Poly next_carry;
        if (s.size() > 1) next_carry.assign(s.begin() + 1, s.end());
        if (next_carry.empty()) next_carry.emplace_back(0);
        next_carry[0] += q;
        while (next_carry.size() > 1 && next_carry.back() == 0) next_carry.pop_back();
        carry = std::move(next_carry);
        if (probe) {
            ++probe->digits_produced;
            if (probe->track_carry) {
                for (const auto& cc : carry) {
                    if (cc > probe->carry_max) probe->carry_max = cc;
                }
            }
        }
    }
};

struct RuleNodeAccessTag {};

struct RuleNode final : Node {
    FixedPointRule rule;
    RuleNode(FixedPointRule r, const PrimeContext& c) : Node(c), rule(std::move(r)) {}
    void produce_next() override;
};

struct ExternalNode final : Node {
    std::function<mpz_class(long)> oracle;
    long cur_prec = 0;
    mpz_class cur_val = 0;

    ExternalNode(std::function<mpz_class(long)> f, const PrimeContext& c)
        : Node(c), oracle(std::move(f)) {}

    void produce_next() override {
        long n = static_cast<long>(digits.size());
        if (n >= cur_prec) {
            long np = std::max(n + 1, 2 * cur_prec);
            mpz_class m = ctx.pow(np);
            cur_val = oracle(np);
            mpz_fdiv_r(cur_val.get_mpz_t(), cur_val.get_mpz_t(), m.get_mpz_t());
            cur_prec = np;
        }
        mpz_class t = cur_val / ctx.pow(n);
        mpz_class d;
        mpz_fdiv_r(d.get_mpz_t(), t.get_mpz_t(), ctx.prime().get_mpz_t());
        digits.push_back(d.get_si());
    }
};

// Self-reference inside a division fixed point: only digits strictly below
// the one being produced are readable.
struct SelfRefNode final : Node {
    Node* target = nullptr;
    explicit SelfRefNode(const PrimeContext& c) : Node(c) {}
    void produce_next() override {
        throw ContractionViolation("self-reference queried at a not-yet-produced digit");
    }
    long digit(long n) override {
        if (n < 0 || n >= static_cast<long>(target->digits.size())) {
            throw ContractionViolation("self-reference queried at digit " + std::to_string(n));
        }
        return target->digits[n];
    }
};

// a / b as the fixed point of  x -> num - p e' x  where num = a c, e' fills
// b c = 1 + p e', and c inverts the leading digit of b modulo p.
struct DivNode final : Node {
    std::shared_ptr<Node> body;

    DivNode(const PrimeContext& c) : Node(c) {}

    void produce_next() override {
        long n = static_cast<long>(digits.size());
        digits.push_back(body->digit(n));
    }
};

struct InstrumentedNode final : Node {
    std::shared_ptr<Node> inner;
    long high_water = -1;
    std::uint64_t touches = 0;
    long online_limit = -1;
    long violations = 0;

    InstrumentedNode(std::shared_ptr<Node> in, const PrimeContext& c)
        : Node(c), inner(std::move(in)) {}
    void produce_next() override {
        throw DomainError("instrumented node delegates digit access");
    }
    long digit(long n) override {
        ++touches;
        high_water = std::max(high_water, n);
        if (online_limit >= 0 && n > online_limit) ++violations;
        return inner->digit(n);
    }
};

}  // namespace relaxed_detail

using relaxed_detail::Node;

// ---------------------------------------------------------------------------
// SelfDigits / RuleNode
// ---------------------------------------------------------------------------

long SelfDigits::digit(long i) const {
    if (i < 0 || i >= limit_) {
        throw ContractionViolation("fixed-point rule read digit " + std::to_string(i) +
                                   " while producing digit " + std::to_string(limit_));
    }
    return (*digits_)[i];
}

struct RuleNodeAccess {
    static SelfDigits view(const std::vector<long>* d, long limit) { return SelfDigits(d, limit); }
};

namespace relaxed_detail {

void RuleNode::produce_next() {
    long n = static_cast<long>(digits.size());
    SelfDigits view = RuleNodeAccess::view(&digits, n);
    long d = rule(view, n);
    if (d < 0 || d >= p) throw DomainError("fixed-point rule produced an out-of-range digit");
    digits.push_back(d);
}

}  // namespace relaxed_detail

// ---------------------------------------------------------------------------
// LazyNumber
// ---------------------------------------------------------------------------

const PrimeContext& LazyNumber::context() const { return node_->ctx; }

long LazyNumber::digit(long n) const { return node_->digit(n); }

mpz_class LazyNumber::approx(long N) const {
    mpz_class acc = 0;
    for (long i = N - 1; i >= 0; --i) acc = acc * node_->ctx.prime() + node_->digit(i);
    return acc;
}

PadicScalar LazyNumber::to_scalar(long N) const {
    return PadicScalar::from_value(approx(N), N, node_->ctx);
}

LazyNumber LazyNumber::constant(mpz_class value, const PrimeContext& ctx) {
    return LazyNumber(std::make_shared<relaxed_detail::ConstantNode>(std::move(value), ctx));
}

LazyNumber LazyNumber::external(std::function<mpz_class(long)> approx, const PrimeContext& ctx) {
    return LazyNumber(std::make_shared<relaxed_detail::ExternalNode>(std::move(approx), ctx));
}

LazyNumber LazyNumber::fixed_point(FixedPointRule rule, const PrimeContext& ctx) {
    return LazyNumber(std::make_shared<relaxed_detail::RuleNode>(std::move(rule), ctx));
}

LazyNumber LazyNumber::instrumented(const LazyNumber& inner) {
    return LazyNumber(
        std::make_shared<relaxed_detail::InstrumentedNode>(inner.node_, inner.node_->ctx));
}

long LazyNumber::high_water() const {
    auto* n = dynamic_cast<relaxed_detail::InstrumentedNode*>(node_.get());
    if (!n) throw DomainError("high_water: not an instrumented number");
    return n->high_water;
}

std::uint64_t LazyNumber::touches() const {
    auto* n = dynamic_cast<relaxed_detail::InstrumentedNode*>(node_.get());
    if (!n) throw DomainError("touches: not an instrumented number");
    return n->touches;
}

void LazyNumber::set_online_limit(long limit) const {
    auto* n = dynamic_cast<relaxed_detail::InstrumentedNode*>(node_.get());
    if (!n) throw DomainError("set_online_limit: not an instrumented number");
    n->online_limit = limit;
}

long LazyNumber::online_violations() const {
    auto* n = dynamic_cast<relaxed_detail::InstrumentedNode*>(node_.get());
    if (!n) throw DomainError("online_violations: not an instrumented number");
    return n->violations;
}

namespace {

void check_ctx(const LazyNumber& a, const LazyNumber& b) {
    if (a.context() != b.context()) throw DomainError("lazy: prime mismatch");
}

}  // namespace

LazyNumber lazy_add(const LazyNumber& x, const LazyNumber& y) {
    check_ctx(x, y);
    return LazyNumber(
        std::make_shared<relaxed_detail::AddNode>(x.node_, y.node_, x.context()));
}

LazyNumber lazy_sub(const LazyNumber& x, const LazyNumber& y) {
    check_ctx(x, y);
    return LazyNumber(
        std::make_shared<relaxed_detail::SubNode>(x.node_, y.node_, x.context()));
}

LazyNumber lazy_mul_probed(const LazyNumber& x, const LazyNumber& y, MulProbe* probe) {
    check_ctx(x, y);
    return LazyNumber(
        std::make_shared<relaxed_detail::MulNode>(x.node_, y.node_, x.context(), probe));
}

LazyNumber lazy_mul(const LazyNumber& x, const LazyNumber& y) {
    return lazy_mul_probed(x, y, nullptr);
}

LazyNumber lazy_shift(const LazyNumber& x, long k) {
    return LazyNumber(std::make_shared<relaxed_detail::ShiftNode>(x.node_, k, x.context()));
}

long lazy_val(const LazyNumber& x) {
    const long cap = x.context().val_cap();
    for (long i = 0; i <= cap; ++i) {
        if (x.digit(i) != 0) return i;
    }
    throw ValuationCapExceeded("lazy_val: no nonzero digit within the valuation cap");
}

LazyEquality lazy_is_equal(const LazyNumber& x, const LazyNumber& y, long bound) {
    check_ctx(x, y);
    for (long i = 0; i < bound; ++i) {
        if (x.digit(i) != y.digit(i)) return {false, i};
    }
    return {true, -1};
}

LazyNumber lazy_div(const LazyNumber& a, const LazyNumber& b) {
    check_ctx(a, b);
    const PrimeContext& ctx = a.context();
    long v = lazy_val(b);  // may throw ValuationCapExceeded
    LazyNumber num = v > 0 ? lazy_shift(a, -v) : a;
    LazyNumber den = v > 0 ? lazy_shift(b, -v) : b;
    long b0 = den.digit(0);
    mpz_class cinv = inverse_mod_pow(mpz_class(b0), 1, ctx);
    if (cinv != 1) {
        LazyNumber c = LazyNumber::constant(cinv, ctx);
        num = lazy_mul(num, c);
        den = lazy_mul(den, c);
    }
    // den = 1 + p e'
    LazyNumber eprime = lazy_shift(lazy_sub(den, LazyNumber::constant(1, ctx)), -1);

    auto div = std::make_shared<relaxed_detail::DivNode>(ctx);
    auto self = std::make_shared<relaxed_detail::SelfRefNode>(ctx);
    self->target = div.get();
    LazyNumber selfnum(self);
    LazyNumber body = lazy_sub(num, lazy_shift(lazy_mul(eprime, selfnum), 1));
    div->body = body.node_;
    return LazyNumber(div);
}

}  // namespace padlab
