#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qgemm/bench.hpp"
#include "qgemm/gemm.hpp"
#include "qgemm/plan.hpp"
#include "qgemm/prng.hpp"

namespace qgemm {

/// Outcome of cross-checking one algorithm against the naive oracle.
struct VerifyResult {
    Algorithm algorithm = Algorithm::Naive;
    std::string backend;
    std::size_t cases = 0;
    std::size_t skipped = 0;     ///< seeds where no plan was feasible
    bool passed = true;
    // first failing case, valid when !passed
    std::uint64_t seed = 0;
    std::size_t m = 0, k = 0, n = 0;
    std::size_t row = 0, col = 0;
    Residue got = 0, want = 0;
};

namespace detail {

template <class B>
ResidueMatrix run_algorithm(Algorithm algo, const ResidueMatrix& a, const ResidueMatrix& b,
                            const PrimeModulus& mod, int beta) {
    const std::size_t k = a.cols;
    switch (algo) {
        case Algorithm::Naive:
            return naive_gemm(a, b, mod);
        case Algorithm::CommonCompressed: {
            // k = 1 has nothing to pack; run the same kernel in its e = 1 layout.
            CompressionPlan plan = [&] {
                try {
                    return plan_compression(mod, k, beta);
                } catch (const NoCompression&) {
                    if (k > 1) throw;
                    return uncompressed_plan(mod, k, beta);
                }
            }();
            return mul_common_compressed<B>(a, b, plan);
        }
        case Algorithm::RightCompressed: {
            const auto plan = plan_packed_axis(mod, k, b.cols, beta);
            return uncompress(mul_right_compressed(a, compress_outer_cols<B>(b, plan)));
        }
        case Algorithm::LeftCompressed: {
            const auto plan = plan_packed_axis(mod, k, a.rows, beta);
            return uncompress(mul_left_compressed(compress_outer_rows<B>(a, plan), b));
        }
        case Algorithm::FullCompressed:
            return mul_full_compressed<B>(a, b, plan_full(mod, k, beta));
        case Algorithm::Blocked: {
            // Split in two panels so the panel path is actually exercised.
            const std::uint64_t kp = (k + 1) / 2;
            const auto plan = kp >= 2 ? plan_compression(mod, kp, beta)
                                      : uncompressed_plan(mod, 1, beta);
            return blocked_accumulate<B>(a, b, plan, kp);
        }
    }
    throw std::invalid_argument("unknown algorithm");
}

template <class B>
VerifyResult verify_algorithm(Algorithm algo, const char* backend_name,
                              const PrimeModulus& mod, std::size_t max_dim,
                              std::uint64_t seeds, int beta) {
    VerifyResult res;
    res.algorithm = algo;
    res.backend = backend_name;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        SplitMix64 dims(seed * 0x51ab1e ^ 0xfeed);
        const std::size_t m = 1 + dims.below(max_dim);
        const std::size_t k = 1 + dims.below(max_dim);
        const std::size_t n = 1 + dims.below(max_dim);
        const ResidueMatrix a = random_residue_matrix(m, k, mod, seed * 2 + 1);
        const ResidueMatrix b = random_residue_matrix(k, n, mod, seed * 2 + 2);

        ResidueMatrix got(0, 0);
        try {
            got = run_algorithm<B>(algo, a, b, mod, beta);
        } catch (const NoCompression&) {
            ++res.skipped;
            continue;
        }
        const ResidueMatrix want = naive_gemm(a, b, mod);
        ++res.cases;
        if (got != want) {
            res.passed = false;
            res.seed = seed;
            res.m = m; res.k = k; res.n = n;
            bool found = false;
            for (std::size_t i = 0; i < m && !found; ++i)
                for (std::size_t j = 0; j < n && !found; ++j)
                    if (got.at(i, j) != want.at(i, j)) {
                        res.row = i; res.col = j;
                        res.got = got.at(i, j);
                        res.want = want.at(i, j);
                        found = true;
                    }
            return res;
        }
    }
    return res;
}

} // namespace detail

/// Cross-check every compressed algorithm against the naive oracle on
/// seeded random matrices, on both word backends.
inline std::vector<VerifyResult> run_verify(const PrimeModulus& mod, std::size_t max_dim,
                                            std::uint64_t seeds, int beta = 53) {
    std::vector<VerifyResult> out;
    const int beta_double = std::min(beta, DoubleWord::exact_bits);
    const int beta_int = beta <= DoubleWord::exact_bits ? Int64Word::exact_bits : beta;
    for (Algorithm algo : {Algorithm::CommonCompressed, Algorithm::RightCompressed,
                           Algorithm::LeftCompressed, Algorithm::FullCompressed,
                           Algorithm::Blocked}) {
        out.push_back(detail::verify_algorithm<DoubleWord>(algo, "double", mod, max_dim,
                                                           seeds, beta_double));
        out.push_back(detail::verify_algorithm<Int64Word>(algo, "int64", mod, max_dim,
                                                          seeds, beta_int));
    }
    return out;
}

} // namespace qgemm
