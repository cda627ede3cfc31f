#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qgemm/errors.hpp"
#include "qgemm/field.hpp"
#include "qgemm/plan.hpp"
#include "qgemm/word.hpp"

namespace qgemm {

namespace detail {

template <class B>
void check_backend(const CompressionPlan& plan) {
    if (plan.beta > B::exact_bits)
        throw PlanMismatch("plan needs " + std::to_string(plan.beta) +
                           " exact bits, backend has " + std::to_string(B::exact_bits));
}

/// Pack digits little-endian in base Q; exact in uint64 since t*e < 63.
inline std::uint64_t horner_pack(std::span<const Residue> v, int t) {
    std::uint64_t r = 0;
    for (std::size_t i = v.size(); i-- > 0;)
        r = (r << t) | v[i];
    return r;
}

/// Per-plan state for the high-part product step of each backend.
template <class B>
typename B::HighPart make_high_ctx(const CompressionPlan& plan) {
    if constexpr (std::is_same_v<B, DoubleWord>)
        return {plan.inv_qd, plan.q_mask()};
    else
        return {plan.t * plan.d, plan.q_mask()};
}

} // namespace detail

/// Pack up to e residues as sum v[i] * Q^i. Missing high slots are zero,
/// so a short final group needs no special handling.
template <class B>
PackedWord<B> compress_forward(std::span<const Residue> v, const CompressionPlan& plan) {
    detail::check_backend<B>(plan);
    if (v.size() > static_cast<std::size_t>(plan.e))
        throw SlotOverflow("compress_forward: " + std::to_string(v.size()) +
                           " residues into " + std::to_string(plan.e) + " slots");
    return {B::from_u64(detail::horner_pack(v, plan.t))};
}

/// Pack up to e residues in reverse slot order: sum v[d-i] * Q^i over the
/// full plan degree. A short group is logically zero-padded at its end,
/// which after reversal multiplies the packed value by Q^(e-len).
template <class B>
PackedWord<B> compress_reverse(std::span<const Residue> v, const CompressionPlan& plan) {
    detail::check_backend<B>(plan);
    if (v.size() > static_cast<std::size_t>(plan.e))
        throw SlotOverflow("compress_reverse: " + std::to_string(v.size()) +
                           " residues into " + std::to_string(plan.e) + " slots");
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        r = (r << plan.t) | v[i];
    r <<= plan.t * (plan.e - static_cast<int>(v.size()));
    return {B::from_u64(r)};
}

/// Recover the degree-d digit of an accumulated word product, reduced
/// into [0, p-1]: (floor(w / Q^d) mod Q) mod p.
///
/// Valid whenever the part of w at and above Q^d is below 2^beta; the
/// digits of w below Q^d may have rounded (DoubleWord) or wrapped
/// (Int64Word) without affecting the result.
template <class B>
Residue extract_coefficient(PackedWord<B> w, const CompressionPlan& plan) {
    detail::check_backend<B>(plan);
    std::uint64_t digit;
    if constexpr (std::is_same_v<B, DoubleWord>) {
        if (plan.extraction == ExtractionMode::AddHighBits) {
            // Adding Q^(2d+1) pins the exponent, so the mantissa holds
            // floor(w / ulp) and the wanted digit sits at a fixed offset.
            // Needs w < Q^(2d+1), guaranteed by the reduced kmax.
            const double anchor = std::ldexp(1.0, plan.t * (2 * plan.d + 1));
            const std::uint64_t mantissa =
                std::bit_cast<std::uint64_t>(w.value + anchor) & ((std::uint64_t{1} << 52) - 1);
            digit = (mantissa >> (52 - plan.t * plan.e)) & plan.q_mask();
        } else {
            const double high = w.value * plan.inv_qd;  // exact power-of-two scale
            assert(high < std::ldexp(1.0, plan.beta));
            digit = static_cast<std::uint64_t>(static_cast<std::int64_t>(high)) & plan.q_mask();
        }
    } else {
        digit = (w.value >> (plan.t * plan.d)) & plan.q_mask();
    }
    return plan.modulus.reduce(digit);
}

/// Split a word into its e base-Q digits, least significant first. The
/// digits are returned unreduced (each in [0, Q-1]).
template <class B>
std::vector<std::uint64_t> extract_all(PackedWord<B> w, const CompressionPlan& plan) {
    detail::check_backend<B>(plan);
    const int total_bits = plan.t * plan.e;
    if (w.value < typename B::value_type{} ||
        !(w.value < B::from_u64(std::uint64_t{1} << total_bits)))
        throw DigitOverflow("extract_all: word does not fit " + std::to_string(plan.e) +
                            " digits of " + std::to_string(plan.t) + " bits");
    std::uint64_t bits = B::to_u64(w.value);
    std::vector<std::uint64_t> digits(plan.e);
    for (int i = 0; i < plan.e; ++i) {
        digits[i] = bits & plan.q_mask();
        bits >>= plan.t;
    }
    return digits;
}

/// Simultaneous reduction: replace every digit c_i of w by c_i mod p in
/// one pass. Digits are isolated by shift and mask (Q is a power of two)
/// and each takes a single scalar reduction.
template <class B>
PackedWord<B> redq(PackedWord<B> w, const CompressionPlan& plan) {
    detail::check_backend<B>(plan);
    const int total_bits = plan.t * plan.e;
    if (w.value < typename B::value_type{} ||
        !(w.value < B::from_u64(std::uint64_t{1} << total_bits)))
        throw DigitOverflow("redq: word does not fit " + std::to_string(plan.e) +
                            " digits of " + std::to_string(plan.t) + " bits");
    std::uint64_t bits = B::to_u64(w.value);
    std::uint64_t out = 0;
    for (int i = 0; i < total_bits; i += plan.t)
        out |= static_cast<std::uint64_t>(plan.modulus.reduce((bits >> i) & plan.q_mask())) << i;
    return {B::from_u64(out)};
}

/// Reduce a row of accumulated dot products to residues and repack them
/// forward in groups of e.
template <class B>
std::vector<PackedWord<B>> reduce_and_compress(std::span<const PackedWord<B>> row,
                                               const CompressionPlan& plan) {
    std::vector<Residue> reduced(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
        reduced[i] = extract_coefficient(row[i], plan);

    std::vector<PackedWord<B>> out;
    out.reserve((row.size() + plan.e - 1) / plan.e);
    for (std::size_t g = 0; g < reduced.size(); g += plan.e) {
        const std::size_t len = std::min<std::size_t>(plan.e, reduced.size() - g);
        out.push_back(compress_forward<B>(std::span<const Residue>(reduced).subspan(g, len), plan));
    }
    return out;
}

} // namespace qgemm
