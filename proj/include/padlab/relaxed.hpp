#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "padlab/core.hpp"

namespace padlab {

namespace relaxed_detail {
struct Node;
}

/// Read-only view of the digits a fixed-point rule has already produced of
/// itself; indices at or above the digit currently being computed are
/// rejected (that is what makes the rule a contraction).
class SelfDigits {
public:
    long digit(long i) const;

private:
    friend struct RuleNodeAccess;
    SelfDigits(const std::vector<long>* d, long limit) : digits_(d), limit_(limit) {}
    const std::vector<long>* digits_;
    long limit_;
};

/// Rule computing digit n from the first n digits of the value itself.
using FixedPointRule = std::function<long(const SelfDigits&, long)>;

/// Optional probe attached to a relaxed multiplication node.
struct MulProbe {
    bool record_tiles = false;
    bool track_carry = false;
    struct Tile {
        long i, j, size;
    };
    std::vector<Tile> tiles;
    mpz_class carry_max = 0;       // largest carry-polynomial coefficient seen
    std::uint64_t digits_produced = 0;
};

/// A lazy (relaxed) p-adic integer: a digit-producing node with a cache.
/// Digit queries mutate the shared cache; a DAG must not be queried from
/// several threads at once.
class LazyNumber {
public:
    LazyNumber() = default;

    static LazyNumber constant(mpz_class value, const PrimeContext& ctx);
    /// Oracle callback: approx(N) must return an integer congruent to the
    /// value modulo p^N. Queried at doubling precisions and memoized.
    static LazyNumber external(std::function<mpz_class(long)> approx, const PrimeContext& ctx);
    static LazyNumber fixed_point(FixedPointRule rule, const PrimeContext& ctx);
    /// Counting wrapper used for demand accounting and on-line checks.
    static LazyNumber instrumented(const LazyNumber& inner);

    bool valid() const { return node_ != nullptr; }
    const PrimeContext& context() const;

    long digit(long n) const;
    /// Integer formed by digits 0..N-1.
    mpz_class approx(long N) const;
    PadicScalar to_scalar(long N) const;

    // instrumentation accessors; only meaningful on instrumented() numbers
    long high_water() const;
    std::uint64_t touches() const;
    void set_online_limit(long limit) const;
    long online_violations() const;

    friend LazyNumber lazy_add(const LazyNumber& x, const LazyNumber& y);
    friend LazyNumber lazy_sub(const LazyNumber& x, const LazyNumber& y);
    friend LazyNumber lazy_mul(const LazyNumber& x, const LazyNumber& y);
    friend LazyNumber lazy_mul_probed(const LazyNumber& x, const LazyNumber& y, MulProbe* probe);
    /// Multiply by p^k (k >= 0) or divide exactly by p^-k (k < 0; the low
    /// digits must be zero).
    friend LazyNumber lazy_shift(const LazyNumber& x, long k);
    /// a / b in Zp via the fixed point of x -> ac - p b' x. Finds val(b) by
    /// bounded search; ValuationCapExceeded if no nonzero digit shows up.
    friend LazyNumber lazy_div(const LazyNumber& a, const LazyNumber& b);

private:
    explicit LazyNumber(std::shared_ptr<relaxed_detail::Node> node) : node_(std::move(node)) {}
    std::shared_ptr<relaxed_detail::Node> node_;
};

LazyNumber lazy_add(const LazyNumber& x, const LazyNumber& y);
LazyNumber lazy_sub(const LazyNumber& x, const LazyNumber& y);
LazyNumber lazy_mul(const LazyNumber& x, const LazyNumber& y);
LazyNumber lazy_mul_probed(const LazyNumber& x, const LazyNumber& y, MulProbe* probe);
LazyNumber lazy_shift(const LazyNumber& x, long k);
LazyNumber lazy_div(const LazyNumber& a, const LazyNumber& b);

/// Index of the first nonzero digit; throws ValuationCapExceeded past the
/// context's val_cap (a zero value would loop forever).
long lazy_val(const LazyNumber& x);

/// Semidecision truncated at `bound` digits: either the first index where
/// the digit streams differ, or agreement of the first `bound` digits
/// (which is not equality of the values).
struct LazyEquality {
    bool agree;
    long differ_at;  // valid when !agree
};
LazyEquality lazy_is_equal(const LazyNumber& x, const LazyNumber& y, long bound);

}  // namespace padlab
