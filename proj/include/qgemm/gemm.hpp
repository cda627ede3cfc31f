#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "qgemm/errors.hpp"
#include "qgemm/field.hpp"
#include "qgemm/matrix.hpp"
#include "qgemm/pack.hpp"
#include "qgemm/plan.hpp"
#include "qgemm/word.hpp"

namespace qgemm {

namespace detail {

inline void check_inner_dims(const ResidueMatrix& a, const ResidueMatrix& b) {
    if (a.cols != b.rows)
        throw DimensionMismatch("inner dimensions disagree: " +
                                std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                                " times " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
}

inline void check_common_dim(const CompressionPlan& plan, std::size_t k) {
    if (k > plan.kmax)
        throw PlanMismatch("common dimension " + std::to_string(k) +
                           " exceeds kmax=" + std::to_string(plan.kmax) +
                           " for p=" + std::to_string(plan.p()) +
                           ", Q=2^" + std::to_string(plan.t));
}

inline bool plans_compatible(const CompressionPlan& a, const CompressionPlan& b) {
    return a.p() == b.p() && a.t == b.t && a.e == b.e && a.beta == b.beta;
}

inline std::size_t group_count(std::size_t len, int slots) {
    return (len + slots - 1) / slots;
}

} // namespace detail

/// Wall-clock split between the word-product loop and everything done to
/// get data in and out of packed form (compression, digit extraction,
/// reductions). Filled by the multiply routines when a sink is passed.
struct PhaseSeconds {
    double multiply = 0;
    double convert = 0;
};

namespace detail {

class PhaseTimer {
public:
    explicit PhaseTimer(double* slot) : slot_(slot) {
        if (slot_) start_ = std::chrono::steady_clock::now();
    }
    ~PhaseTimer() {
        if (slot_)
            *slot_ += std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start_).count();
    }
    PhaseTimer(const PhaseTimer&) = delete;
    PhaseTimer& operator=(const PhaseTimer&) = delete;

private:
    double* slot_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

/// Classical triple-loop product mod p. Unconditionally exact: partial
/// sums are reduced every 1024 terms, well before a 64-bit accumulator
/// could wrap (1024 * (p-1)^2 < 2^62 for every accepted p).
inline ResidueMatrix naive_gemm(const ResidueMatrix& a, const ResidueMatrix& b,
                                const PrimeModulus& mod) {
    detail::check_inner_dims(a, b);
    constexpr std::size_t spill_every = 1024;
    ResidueMatrix c(a.rows, b.cols);
    std::vector<std::uint64_t> acc(b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t l = 0; l < a.cols; ++l) {
            const std::uint64_t ail = a.at(i, l);
            const Residue* brow = &b.data[l * b.cols];
            for (std::size_t j = 0; j < b.cols; ++j)
                acc[j] += ail * brow[j];
            if ((l + 1) % spill_every == 0)
                for (auto& v : acc) v %= mod.value();
        }
        for (std::size_t j = 0; j < b.cols; ++j)
            c.at(i, j) = mod.reduce(acc[j]);
    }
    return c;
}

/// Pack each row of A in groups of e along the common dimension, in
/// reverse slot order. Result is logical m x k stored as m x ceil(k/e).
template <class B>
CompressedMatrix<B> compress_rows_reversed(const ResidueMatrix& a, const CompressionPlan& plan) {
    detail::check_common_dim(plan, a.cols);
    const std::size_t groups = detail::group_count(a.cols, plan.e);
    CompressedMatrix<B> out(a.rows, a.cols, a.rows, groups,
                            {PackDirection::Reversed, PackAxis::Column, plan.e}, plan);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t g = 0; g < groups; ++g) {
            const std::size_t base = g * plan.e;
            const std::size_t len = std::min<std::size_t>(plan.e, a.cols - base);
            out.at(i, g) = compress_reverse<B>(
                std::span<const Residue>(&a.data[i * a.cols + base], len), plan);
        }
    return out;
}

/// Pack each column of B in groups of e down the common dimension.
/// Result is logical k x n stored as ceil(k/e) x n.
template <class B>
CompressedMatrix<B> compress_cols_forward(const ResidueMatrix& b, const CompressionPlan& plan) {
    detail::check_common_dim(plan, b.rows);
    const std::size_t groups = detail::group_count(b.rows, plan.e);
    CompressedMatrix<B> out(b.rows, b.cols, groups, b.cols,
                            {PackDirection::Forward, PackAxis::Row, plan.e}, plan);
    std::vector<Residue> column(plan.e);
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t base = g * plan.e;
        const std::size_t len = std::min<std::size_t>(plan.e, b.rows - base);
        for (std::size_t j = 0; j < b.cols; ++j) {
            for (std::size_t s = 0; s < len; ++s)
                column[s] = b.at(base + s, j);
            out.at(g, j) = compress_forward<B>(
                std::span<const Residue>(column.data(), len), plan);
        }
    }
    return out;
}

/// Pack each row of B in groups of e along the output (n) axis. The
/// common dimension stays unpacked, so no kmax restriction applies here;
/// the multiply enforces it.
template <class B>
CompressedMatrix<B> compress_outer_cols(const ResidueMatrix& b, const CompressionPlan& plan) {
    const std::size_t groups = detail::group_count(b.cols, plan.e);
    CompressedMatrix<B> out(b.rows, b.cols, b.rows, groups,
                            {PackDirection::Forward, PackAxis::Column, plan.e}, plan);
    for (std::size_t i = 0; i < b.rows; ++i)
        for (std::size_t g = 0; g < groups; ++g) {
            const std::size_t base = g * plan.e;
            const std::size_t len = std::min<std::size_t>(plan.e, b.cols - base);
            out.at(i, g) = compress_forward<B>(
                std::span<const Residue>(&b.data[i * b.cols + base], len), plan);
        }
    return out;
}

/// Pack each column of A in groups of e down the output (m) axis.
template <class B>
CompressedMatrix<B> compress_outer_rows(const ResidueMatrix& a, const CompressionPlan& plan) {
    const std::size_t groups = detail::group_count(a.rows, plan.e);
    CompressedMatrix<B> out(a.rows, a.cols, groups, a.cols,
                            {PackDirection::Forward, PackAxis::Row, plan.e}, plan);
    std::vector<Residue> column(plan.e);
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t base = g * plan.e;
        const std::size_t len = std::min<std::size_t>(plan.e, a.rows - base);
        for (std::size_t j = 0; j < a.cols; ++j) {
            for (std::size_t s = 0; s < len; ++s)
                column[s] = a.at(base + s, j);
            out.at(g, j) = compress_forward<B>(
                std::span<const Residue>(column.data(), len), plan);
        }
    }
    return out;
}

/// Undo any of the compress_* layouts: split every word into digits,
/// reduce them into [0, p-1] and scatter them back to logical positions.
template <class B>
ResidueMatrix uncompress(const CompressedMatrix<B>& cm) {
    ResidueMatrix out(cm.logical_rows, cm.logical_cols);
    const int slots = cm.orientation.slots;
    for (std::size_t si = 0; si < cm.stored_rows; ++si)
        for (std::size_t sj = 0; sj < cm.stored_cols; ++sj) {
            const auto digits = extract_all(cm.at(si, sj), cm.plan);
            for (int s = 0; s < slots; ++s) {
                const std::uint64_t digit =
                    cm.orientation.direction == PackDirection::Reversed
                        ? digits[slots - 1 - s]
                        : digits[s];
                std::size_t i = si, j = sj;
                if (cm.orientation.axis == PackAxis::Column)
                    j = sj * slots + s;
                else
                    i = si * slots + s;
                if (i < cm.logical_rows && j < cm.logical_cols)
                    out.at(i, j) = cm.plan.modulus.reduce(digit);
            }
        }
    return out;
}

/// The packed inner product over the common dimension: every term is the
/// exact part of one word product at and above Q^d, so the running value
/// provably stays below 2^beta and the digit at Q^0 of each accumulator
/// is the plain dot product, still unreduced.
template <class B>
std::vector<PackedWord<B>> packed_common_product(const CompressedMatrix<B>& ca,
                                                 const CompressedMatrix<B>& cb) {
    if (!detail::plans_compatible(ca.plan, cb.plan))
        throw PlanMismatch("operands were packed under different plans");
    if (ca.orientation.direction != PackDirection::Reversed ||
        ca.orientation.axis != PackAxis::Column ||
        cb.orientation.direction != PackDirection::Forward ||
        cb.orientation.axis != PackAxis::Row)
        throw PlanMismatch("common product needs a row-reversed left operand "
                           "and a column-forward right operand");
    if (ca.logical_cols != cb.logical_rows || ca.stored_cols != cb.stored_rows)
        throw DimensionMismatch("inner dimensions disagree: " +
                                std::to_string(ca.logical_rows) + "x" + std::to_string(ca.logical_cols) +
                                " times " + std::to_string(cb.logical_rows) + "x" + std::to_string(cb.logical_cols));
    detail::check_common_dim(ca.plan, ca.logical_cols);

    const std::size_t m = ca.logical_rows;
    const std::size_t n = cb.logical_cols;
    const std::size_t groups = ca.stored_cols;
    const auto ctx = detail::make_high_ctx<B>(ca.plan);

    std::vector<PackedWord<B>> acc(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        const PackedWord<B>* arow = &ca.data[i * groups];
        PackedWord<B>* crow = &acc[i * n];
        for (std::size_t g = 0; g < groups; ++g) {
            const auto a = arow[g].value;
            const PackedWord<B>* brow = &cb.data[g * n];
            for (std::size_t j = 0; j < n; ++j)
                crow[j].value += B::high_part(a, brow[j].value, ctx);
        }
    }
    return acc;
}

/// Reduce one accumulator of packed_common_product to its residue.
template <class B>
Residue reduce_common_entry(PackedWord<B> w, const CompressionPlan& plan) {
    return plan.modulus.reduce(B::to_u64(w.value) & plan.q_mask());
}

/// Multiply with the common dimension packed: compress both operands,
/// run the packed product and reduce every entry.
template <class B = DoubleWord>
ResidueMatrix mul_common_compressed(const ResidueMatrix& a, const ResidueMatrix& b,
                                    const CompressionPlan& plan) {
    detail::check_inner_dims(a, b);
    return mul_common_compressed(compress_rows_reversed<B>(a, plan),
                                 compress_cols_forward<B>(b, plan));
}

/// Same product for operands the caller compressed already.
template <class B>
ResidueMatrix mul_common_compressed(const CompressedMatrix<B>& ca,
                                    const CompressedMatrix<B>& cb) {
    const auto acc = packed_common_product(ca, cb);
    ResidueMatrix c(ca.logical_rows, cb.logical_cols);
    for (std::size_t idx = 0; idx < acc.size(); ++idx)
        c.data[idx] = reduce_common_entry(acc[idx], ca.plan);
    return c;
}

/// Common-dimension product returned in compressed form: entries are
/// reduced and rows repacked forward in groups of e.
template <class B = DoubleWord>
CompressedMatrix<B> mul_common_repacked(const ResidueMatrix& a, const ResidueMatrix& b,
                                        const CompressionPlan& plan) {
    const ResidueMatrix c = mul_common_compressed<B>(a, b, plan);
    return compress_outer_cols<B>(c, plan);
}

/// Product of an uncompressed left operand by a right operand packed on
/// its n axis, before any reduction: entry (i, h) holds the e dot
/// products of block h as base-Q digits, each still below Q.
template <class B>
CompressedMatrix<B> packed_right_product(const ResidueMatrix& a, const CompressedMatrix<B>& cb) {
    if (cb.orientation.direction != PackDirection::Forward ||
        cb.orientation.axis != PackAxis::Column)
        throw PlanMismatch("right product needs the right operand packed forward on its columns");
    if (a.cols != cb.logical_rows)
        throw DimensionMismatch("inner dimensions disagree: " +
                                std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                                " times " + std::to_string(cb.logical_rows) + "x" +
                                std::to_string(cb.logical_cols));
    detail::check_common_dim(cb.plan, a.cols);

    const std::size_t m = a.rows;
    const std::size_t h_cols = cb.stored_cols;
    CompressedMatrix<B> cc(m, cb.logical_cols, m, h_cols, cb.orientation, cb.plan);
    for (std::size_t i = 0; i < m; ++i) {
        PackedWord<B>* crow = &cc.data[i * h_cols];
        for (std::size_t l = 0; l < a.cols; ++l) {
            const auto ail = B::from_u64(a.at(i, l));
            const PackedWord<B>* brow = &cb.data[l * h_cols];
            for (std::size_t h = 0; h < h_cols; ++h)
                crow[h].value += ail * brow[h].value;
        }
    }
    return cc;
}

/// Apply the simultaneous digit reduction to every word of a matrix.
template <class B>
void redq_in_place(CompressedMatrix<B>& cm) {
    for (auto& w : cm.data) w = redq(w, cm.plan);
}

/// Right compression: ordinary word products against a right operand
/// packed on the n axis, then one simultaneous reduction per word.
template <class B>
CompressedMatrix<B> mul_right_compressed(const ResidueMatrix& a, const CompressedMatrix<B>& cb) {
    auto cc = packed_right_product(a, cb);
    redq_in_place(cc);
    return cc;
}

/// Right compression with an already compressed left operand; it is
/// unpacked first, then multiplied as above.
template <class B>
CompressedMatrix<B> mul_right_compressed(const CompressedMatrix<B>& ca,
                                         const CompressedMatrix<B>& cb) {
    if (ca.orientation.direction != PackDirection::Forward)
        throw PlanMismatch("left operand must be packed forward to be unpacked");
    return mul_right_compressed(uncompress(ca), cb);
}

/// Left compression counterpart of packed_right_product: the left
/// operand is packed forward on its m axis, digit i of entry (g, j)
/// accumulates row g*e+i of the product.
template <class B>
CompressedMatrix<B> packed_left_product(const CompressedMatrix<B>& ca, const ResidueMatrix& b) {
    if (ca.orientation.direction != PackDirection::Forward ||
        ca.orientation.axis != PackAxis::Row)
        throw PlanMismatch("left product needs the left operand packed forward on its rows");
    if (ca.logical_cols != b.rows)
        throw DimensionMismatch("inner dimensions disagree: " +
                                std::to_string(ca.logical_rows) + "x" + std::to_string(ca.logical_cols) +
                                " times " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
    detail::check_common_dim(ca.plan, b.rows);

    const std::size_t g_rows = ca.stored_rows;
    const std::size_t n = b.cols;
    CompressedMatrix<B> cc(ca.logical_rows, n, g_rows, n, ca.orientation, ca.plan);
    for (std::size_t g = 0; g < g_rows; ++g) {
        PackedWord<B>* crow = &cc.data[g * n];
        for (std::size_t l = 0; l < b.rows; ++l) {
            const auto w = ca.at(g, l).value;
            const Residue* brow = &b.data[l * n];
            for (std::size_t j = 0; j < n; ++j)
                crow[j].value += w * B::from_u64(brow[j]);
        }
    }
    return cc;
}

template <class B>
CompressedMatrix<B> mul_left_compressed(const CompressedMatrix<B>& ca, const ResidueMatrix& b) {
    auto cc = packed_left_product(ca, b);
    redq_in_place(cc);
    return cc;
}

/// Both outer dimensions packed at once: rows of A in base Q, columns of
/// B in base Theta = Q^(dq+1). Digit (i, j) of entry (g, h), read in
/// base Q at position i + j*(dq+1), is the dot product for output cell
/// (g*(dq+1)+i, h*(dtheta+1)+j). Returns the uncompressed result.
template <class B = DoubleWord>
ResidueMatrix mul_full_compressed(const ResidueMatrix& a, const ResidueMatrix& b,
                                  const FullPlan& fp, PhaseSeconds* phases = nullptr) {
    detail::check_inner_dims(a, b);
    detail::check_backend<B>(fp.base);
    detail::check_common_dim(fp.base, a.cols);
    using value_type = typename B::value_type;

    const std::size_t k = a.cols;
    const int qs = fp.q_slots();
    const int ts = fp.theta_slots();
    const std::size_t g_rows = detail::group_count(a.rows, qs);
    const std::size_t h_cols = detail::group_count(b.cols, ts);
    const int t = fp.base.t;

    std::vector<value_type> ma(g_rows * k, value_type{});
    std::vector<value_type> mb(k * h_cols, value_type{});
    {
        detail::PhaseTimer timer(phases ? &phases->convert : nullptr);
        // Pack A down its columns, qs residues per word, radix Q.
        for (std::size_t g = 0; g < g_rows; ++g)
            for (std::size_t l = 0; l < k; ++l) {
                std::uint64_t w = 0;
                const std::size_t len = std::min<std::size_t>(qs, a.rows - g * qs);
                for (std::size_t s = len; s-- > 0;)
                    w = (w << t) | a.at(g * qs + s, l);
                ma[g * k + l] = B::from_u64(w);
            }
        // Pack B along its rows, ts residues per word, radix Theta.
        for (std::size_t l = 0; l < k; ++l)
            for (std::size_t h = 0; h < h_cols; ++h) {
                std::uint64_t w = 0;
                const std::size_t len = std::min<std::size_t>(ts, b.cols - h * ts);
                for (std::size_t s = len; s-- > 0;)
                    w = (w << fp.theta_exponent) | b.at(l, h * ts + s);
                mb[l * h_cols + h] = B::from_u64(w);
            }
    }

    // Plain word products; every accumulator stays below
    // Q^((dq+1)(dtheta+1)) < 2^beta, so the arithmetic is exact.
    std::vector<value_type> acc(g_rows * h_cols, value_type{});
    {
        detail::PhaseTimer timer(phases ? &phases->multiply : nullptr);
        for (std::size_t g = 0; g < g_rows; ++g)
            for (std::size_t l = 0; l < k; ++l) {
                const value_type w = ma[g * k + l];
                for (std::size_t h = 0; h < h_cols; ++h)
                    acc[g * h_cols + h] += w * mb[l * h_cols + h];
            }
    }

    ResidueMatrix c(a.rows, b.cols);
    detail::PhaseTimer timer(phases ? &phases->convert : nullptr);
    const std::uint64_t q_mask = fp.base.q_mask();
    for (std::size_t g = 0; g < g_rows; ++g)
        for (std::size_t h = 0; h < h_cols; ++h) {
            std::uint64_t bits = B::to_u64(acc[g * h_cols + h]);
            for (int j = 0; j < ts; ++j)
                for (int i = 0; i < qs; ++i) {
                    const std::uint64_t digit = (bits >> (t * (i + j * qs))) & q_mask;
                    const std::size_t row = g * qs + i;
                    const std::size_t col = h * ts + j;
                    if (row < c.rows && col < c.cols)
                        c.at(row, col) = fp.base.modulus.reduce(digit);
                }
        }
    return c;
}

/// Split the common dimension into panels of at most kpanel columns, run
/// the common-compressed product per panel and accumulate mod p. Equal
/// to naive_gemm for any k, including k far beyond the plan's kmax.
template <class B = DoubleWord>
ResidueMatrix blocked_accumulate(const ResidueMatrix& a, const ResidueMatrix& b,
                                 const CompressionPlan& plan, std::size_t kpanel,
                                 PhaseSeconds* phases = nullptr) {
    detail::check_inner_dims(a, b);
    if (kpanel < 1) throw std::invalid_argument("blocked_accumulate: kpanel must be >= 1");
    detail::check_common_dim(plan, kpanel);

    const std::size_t k = a.cols;
    ResidueMatrix c(a.rows, b.cols);
    for (std::size_t base = 0; base < k; base += kpanel) {
        const std::size_t len = std::min(kpanel, k - base);
        ResidueMatrix ap(a.rows, len);
        ResidueMatrix bp(len, b.cols);
        std::vector<PackedWord<B>> acc;
        {
            detail::PhaseTimer timer(phases ? &phases->convert : nullptr);
            for (std::size_t i = 0; i < a.rows; ++i)
                std::copy_n(&a.data[i * k + base], len, &ap.data[i * len]);
            std::copy_n(&b.data[base * b.cols], len * b.cols, bp.data.begin());
        }
        const auto ca = [&] {
            detail::PhaseTimer timer(phases ? &phases->convert : nullptr);
            return compress_rows_reversed<B>(ap, plan);
        }();
        const auto cb = [&] {
            detail::PhaseTimer timer(phases ? &phases->convert : nullptr);
            return compress_cols_forward<B>(bp, plan);
        }();
        {
            detail::PhaseTimer timer(phases ? &phases->multiply : nullptr);
            acc = packed_common_product(ca, cb);
        }
        detail::PhaseTimer timer(phases ? &phases->convert : nullptr);
        for (std::size_t idx = 0; idx < c.data.size(); ++idx)
            c.data[idx] = plan.modulus.reduce(
                static_cast<std::uint64_t>(c.data[idx]) + reduce_common_entry(acc[idx], plan));
    }
    return c;
}

} // namespace qgemm
