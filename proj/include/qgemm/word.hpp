#pragma once

#include <cstdint>

namespace qgemm {

/// Word backend over binary64. Integers below 2^53 are held exactly;
/// this is the layout the packing bounds were designed around, so packed
/// operands, scalar products and high-part accumulators never round.
struct DoubleWord {
    using value_type = double;
    static constexpr int exact_bits = 53;

    static value_type from_u64(std::uint64_t x) { return static_cast<value_type>(x); }
    static std::uint64_t to_u64(value_type v) { return static_cast<std::uint64_t>(v); }

    /// Per-product state for the high-part kernel: the exact reciprocal
    /// of Q^d, a power of two, so the scale below never rounds.
    struct HighPart {
        double inv_qd;
        std::uint64_t q_mask;
    };

    /// floor(a*b / Q^d). The product rounds to nearest once; under a
    /// valid plan the part below Q^d has enough headroom that the floor
    /// still lands on the exact high part (see the packing bounds in
    /// plan.hpp). Truncation via int64 keeps this branch-free.
    static value_type high_part(value_type a, value_type b, const HighPart& ctx) {
        return static_cast<value_type>(static_cast<std::int64_t>(a * b * ctx.inv_qd));
    }
};

/// Word backend over uint64_t. Multiplication wraps modulo 2^64, which
/// preserves every bit below position 64 exactly; plans keep t*e < 63,
/// so the digit of interest always survives the wrap.
struct Int64Word {
    using value_type = std::uint64_t;
    static constexpr int exact_bits = 63;

    static value_type from_u64(std::uint64_t x) { return x; }
    static std::uint64_t to_u64(value_type v) { return v; }

    struct HighPart {
        int shift;               ///< t*d
        std::uint64_t q_mask;
    };

    /// Digit d of a*b. Bits above the digit may have wrapped, so they
    /// are masked away; the running sum is then the plain dot product,
    /// which stays below Q.
    static value_type high_part(value_type a, value_type b, const HighPart& ctx) {
        return ((a * b) >> ctx.shift) & ctx.q_mask;
    }
};

/// An exact nonnegative integer held in a word backend. Values produced
/// by packing stay below 2^exact_bits; raw word products may be larger
/// and are only meaningful through the extraction routines.
template <class B>
struct PackedWord {
    using backend = B;
    typename B::value_type value{};

    friend bool operator==(const PackedWord&, const PackedWord&) = default;
};

/// Product of two packed words in backend arithmetic (rounded once for
/// DoubleWord, wrapped modulo 2^64 for Int64Word). The degree-d digit of
/// the result is exact under a valid plan.
template <class B>
PackedWord<B> mul(PackedWord<B> a, PackedWord<B> b) {
    return {a.value * b.value};
}

template <class B>
PackedWord<B> add(PackedWord<B> a, PackedWord<B> b) {
    return {a.value + b.value};
}

} // namespace qgemm
