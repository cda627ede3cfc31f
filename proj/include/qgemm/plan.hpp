#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "qgemm/errors.hpp"
#include "qgemm/field.hpp"

namespace qgemm {

/// How the degree-d coefficient is pulled out of an accumulated word.
enum class ExtractionMode {
    ReciprocalMul, ///< multiply by the exact reciprocal of Q^d, then floor
    AddHighBits,   ///< add Q^(2d+1) and read the high mantissa bits directly
};

/// Packing parameters for one compressed layout.
///
/// Q = 2^t is the digit radix, e = d+1 the number of residues per word,
/// and beta the number of bits the word backend represents exactly.
/// A plan is legal for common dimension k exactly when both
///
///     k * (p-1)^2 < Q          (a dot product never overflows a digit)
///     Q^(d+1)     < 2^beta     (the packed high part stays exact)
///
/// hold; kmax is the largest such k for this t.
struct CompressionPlan {
    PrimeModulus modulus;
    int t = 0;                 ///< Q = 2^t
    int d = 0;                 ///< packing degree
    int e = 1;                 ///< residues per word, e = d+1
    int beta = 53;             ///< exactly representable bits of the backend
    std::uint64_t kmax = 0;    ///< largest legal common dimension for this t
    double inv_qd = 1.0;       ///< 2^(-t*d), exact; reciprocal used for extraction
    ExtractionMode extraction = ExtractionMode::ReciprocalMul;

    std::uint64_t q() const { return std::uint64_t{1} << t; }
    std::uint64_t q_mask() const { return q() - 1; }
    std::uint32_t p() const { return modulus.value(); }
};

/// Two-axis packing parameters: rows of the left operand are packed in
/// base Q with dq+1 slots, columns of the right operand in base
/// Theta = Q^(dq+1) with dtheta+1 slots. base.e holds the total digit
/// count (dq+1)*(dtheta+1) so digit splitting and simultaneous reduction
/// can reuse the single-axis routines.
struct FullPlan {
    CompressionPlan base;
    int dq = 0;
    int dtheta = 0;
    int theta_exponent = 0;    ///< Theta = 2^theta_exponent = Q^(dq+1)

    int q_slots() const { return dq + 1; }
    int theta_slots() const { return dtheta + 1; }
};

enum class Algorithm {
    Naive,
    CommonCompressed,
    RightCompressed,
    LeftCompressed,
    FullCompressed,
    Blocked,
};

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Naive:            return "naive";
        case Algorithm::CommonCompressed: return "common";
        case Algorithm::RightCompressed:  return "right";
        case Algorithm::LeftCompressed:   return "left";
        case Algorithm::FullCompressed:   return "full";
        case Algorithm::Blocked:          return "blocked";
    }
    return "?";
}

enum class ReductionKind { Redc, Redq };
enum class ConversionKind { Init, Extract };

/// One operation-count row evaluated at concrete dimensions and a given
/// matrix-multiplication exponent omega.
struct GainEstimate {
    Algorithm algorithm;
    double op_count = 0;        ///< word multiplications, up to a constant
    double op_ratio = 0;        ///< uncompressed count / op_count
    double reduction_count = 0;
    ReductionKind reduction_kind = ReductionKind::Redc;
    double conversion_count = 0;
    ConversionKind conversion_kind = ConversionKind::Init;
};

namespace detail {

/// Smallest t with 2^t > k*(p-1)^2.
inline int minimal_radix_exponent(const PrimeModulus& m, std::uint64_t k) {
    const unsigned __int128 bound =
        static_cast<unsigned __int128>(k) * m.pm1_squared();
    int t = 1;
    while ((static_cast<unsigned __int128>(1) << t) <= bound) ++t;
    return t;
}

/// Largest e with t*e < beta (strictly, so Q^e stays below 2^beta).
inline int word_capacity(int t, int beta) {
    int e = beta / t;
    if (e * t == beta) --e;
    return e;
}

inline std::uint64_t largest_common_dim(const PrimeModulus& m, int t) {
    return ((std::uint64_t{1} << t) - 1) / m.pm1_squared();
}

} // namespace detail

/// Select Q = 2^t, degree d and compression factor e for multiplying with
/// common dimension k over GF(p) on a word backend with beta exact bits.
///
/// t is chosen minimal (which maximizes e); e is capped at k since more
/// slots than the dimension would waste word capacity. Throws
/// NoCompression when fewer than two residues fit in a word.
inline CompressionPlan plan_compression(const PrimeModulus& m, std::uint64_t k,
                                        int beta = 53,
                                        ExtractionMode mode = ExtractionMode::ReciprocalMul) {
    if (k < 1) throw std::invalid_argument("plan_compression: k must be >= 1");
    if (beta < 2) throw std::invalid_argument("plan_compression: beta must be >= 2");

    const int t = detail::minimal_radix_exponent(m, k);
    if (t >= beta)
        throw NoCompression("p=" + std::to_string(m.value()) + ", k=" + std::to_string(k) +
                            " needs " + std::to_string(t) + " bits per digit; only " +
                            std::to_string(beta) + " available");
    const int e_raw = detail::word_capacity(t, beta);
    const int e = static_cast<int>(std::min<std::uint64_t>(e_raw, k));
    if (e < 2)
        throw NoCompression("p=" + std::to_string(m.value()) + ", k=" + std::to_string(k) +
                            ": a word holds fewer than 2 residues");

    CompressionPlan plan{m};
    plan.t = t;
    plan.e = e;
    plan.d = e - 1;
    plan.beta = beta;
    plan.kmax = detail::largest_common_dim(m, t);
    plan.inv_qd = std::ldexp(1.0, -t * plan.d);
    plan.extraction = mode;
    if (mode == ExtractionMode::AddHighBits) {
        // Reading the high mantissa bits costs one bit of headroom, which
        // shrinks the legal dot product by a factor of 2^(1/e).
        const long double limit = std::exp2l(static_cast<long double>(t) - 1.0L / e);
        std::uint64_t km = plan.kmax;
        while (km > 0 && static_cast<long double>(km) * m.pm1_squared() >= limit) --km;
        plan.kmax = km;
    }
    return plan;
}

/// The e = 1 layout: one residue per word, no packing. Used as the
/// baseline for benchmarks and for rank-1 panel blocking; never produced
/// by plan_compression, which treats it as NoCompression.
inline CompressionPlan uncompressed_plan(const PrimeModulus& m, std::uint64_t k,
                                         int beta = 53) {
    if (k < 1) throw std::invalid_argument("uncompressed_plan: k must be >= 1");
    const int t = detail::minimal_radix_exponent(m, k);
    if (t >= beta)
        throw NoCompression("p=" + std::to_string(m.value()) + ", k=" + std::to_string(k) +
                            " overflows even an unpacked word accumulator");
    CompressionPlan plan{m};
    plan.t = t;
    plan.e = 1;
    plan.d = 0;
    plan.beta = beta;
    plan.kmax = detail::largest_common_dim(m, t);
    plan.inv_qd = 1.0;
    return plan;
}

/// Plan for algorithms that pack an outer axis (m or n) rather than the
/// common dimension: the radix still comes from k, which bounds the dot
/// products, but the slot count is capped by the packed axis instead.
/// Degenerates to e = 1 when that axis cannot hold two residues; only an
/// accumulator overflow (t >= beta) is an error.
inline CompressionPlan plan_packed_axis(const PrimeModulus& m, std::uint64_t k,
                                        std::uint64_t axis_len, int beta = 53) {
    if (k < 1 || axis_len < 1)
        throw std::invalid_argument("plan_packed_axis: dimensions must be >= 1");
    const int t = detail::minimal_radix_exponent(m, k);
    if (t >= beta)
        throw NoCompression("p=" + std::to_string(m.value()) + ", k=" + std::to_string(k) +
                            " needs " + std::to_string(t) + " bits per digit; only " +
                            std::to_string(beta) + " available");
    CompressionPlan plan{m};
    plan.t = t;
    plan.e = static_cast<int>(std::min<std::uint64_t>(detail::word_capacity(t, beta), axis_len));
    plan.d = plan.e - 1;
    plan.beta = beta;
    plan.kmax = detail::largest_common_dim(m, t);
    plan.inv_qd = std::ldexp(1.0, -t * plan.d);
    return plan;
}

/// Panel width for splitting a common dimension the direct plan handles
/// poorly (or not at all): the smallest radix whose capacity beats the
/// direct plan's e, taken at that radix's full kmax. Returns 0 when no
/// panel size improves on the direct plan.
inline std::uint64_t choose_panel(const PrimeModulus& m, std::uint64_t k, int beta = 53) {
    int direct_e = 1;
    try {
        direct_e = plan_compression(m, k, beta).e;
    } catch (const NoCompression&) {
    }
    for (int t = 1; t < beta; ++t) {
        const std::uint64_t km = detail::largest_common_dim(m, t);
        if (km == 0) continue;
        const std::uint64_t panel = std::min(km, k);
        const int e = static_cast<int>(
            std::min<std::uint64_t>(detail::word_capacity(t, beta), panel));
        if (e > direct_e) return panel;
    }
    return 0;
}

/// Select degrees for packing both outer dimensions at once. The word
/// capacity E = floor(beta/t) is split as (dq+1)*(dtheta+1) <= E with
/// dq+1 = floor(sqrt(E)) and dtheta+1 as large as the budget allows.
inline FullPlan plan_full(const PrimeModulus& m, std::uint64_t k, int beta = 53) {
    if (k < 1) throw std::invalid_argument("plan_full: k must be >= 1");
    if (beta < 2) throw std::invalid_argument("plan_full: beta must be >= 2");

    const int t = detail::minimal_radix_exponent(m, k);
    const int capacity = t < beta ? detail::word_capacity(t, beta) : 0;
    if (capacity < 4)
        throw NoCompression("p=" + std::to_string(m.value()) + ", k=" + std::to_string(k) +
                            ": cannot pack 2 residues on each axis");

    int q_slots = static_cast<int>(std::sqrt(static_cast<double>(capacity)));
    while (q_slots * q_slots > capacity) --q_slots;      // exact isqrt
    while ((q_slots + 1) * (q_slots + 1) <= capacity) ++q_slots;
    const int theta_slots = capacity / q_slots;

    CompressionPlan base{m};
    base.t = t;
    base.e = q_slots * theta_slots;
    base.d = base.e - 1;
    base.beta = beta;
    base.kmax = detail::largest_common_dim(m, t);
    base.inv_qd = std::ldexp(1.0, -t * base.d);
    return FullPlan{base, q_slots - 1, theta_slots - 1, t * q_slots};
}

/// Evaluate one operation-count row at dimensions (m, k, n) and exponent
/// omega in [2, 3]. Counts are up to the constant hidden in the word
/// multiplication itself; op_ratio compares against the uncompressed
/// classical count m*n*k^(omega-2).
inline GainEstimate predicted_gain(const CompressionPlan& plan, Algorithm algorithm,
                                   double m, double k, double n, double omega) {
    if (omega < 2.0 || omega > 3.0)
        throw std::invalid_argument("predicted_gain: omega must lie in [2, 3]");
    const double e = plan.e;
    const double uncompressed = m * n * std::pow(k, omega - 2.0);

    GainEstimate g;
    g.algorithm = algorithm;
    switch (algorithm) {
        case Algorithm::CommonCompressed:
            g.op_count = m * n * std::pow(k / e, omega - 2.0);
            g.reduction_count = m * n;
            g.reduction_kind = ReductionKind::Redc;
            g.conversion_count = m * n / e;
            g.conversion_kind = ConversionKind::Init;
            break;
        case Algorithm::RightCompressed:
            g.op_count = m * k * std::pow(n / e, omega - 2.0);
            g.reduction_count = m * (n / e);
            g.reduction_kind = ReductionKind::Redq;
            g.conversion_count = m * n / e;
            g.conversion_kind = ConversionKind::Extract;
            break;
        case Algorithm::LeftCompressed:
            g.op_count = n * k * std::pow(m / e, omega - 2.0);
            g.reduction_count = (m / e) * n;
            g.reduction_kind = ReductionKind::Redq;
            g.conversion_count = m * n / e;
            g.conversion_kind = ConversionKind::Extract;
            break;
        case Algorithm::FullCompressed:
            g.op_count = k * std::pow(m * n / e, (omega - 1.0) / 2.0);
            g.reduction_count = (m / std::sqrt(e)) * (n / std::sqrt(e));
            g.reduction_kind = ReductionKind::Redq;
            g.conversion_count = m * n / e;
            g.conversion_kind = ConversionKind::Init;
            break;
        default:
            throw UnsupportedAlgorithm(std::string("predicted_gain: no formula for ") +
                                       algorithm_name(algorithm));
    }
    g.op_ratio = uncompressed / g.op_count;
    return g;
}

} // namespace qgemm
