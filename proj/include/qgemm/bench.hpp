#pragma once

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qgemm/gemm.hpp"
#include "qgemm/plan.hpp"
#include "qgemm/prng.hpp"

namespace qgemm {

/// One benchmark measurement. The checksum (sum of all result residues
/// mod 2^32) must agree across algorithms run on the same seeded inputs.
struct TimingRecord {
    std::string algorithm;
    std::uint32_t p = 0;
    std::size_t m = 0, k = 0, n = 0;
    int t = 0;
    int e = 1;
    double seconds_multiply = 0;
    double seconds_convert = 0;
    std::uint32_t checksum = 0;
};

inline const char* timing_csv_header() {
    return "algorithm,p,m,k,n,t,e,seconds_multiply,seconds_convert,checksum";
}

inline std::string to_csv_row(const TimingRecord& r) {
    std::ostringstream os;
    os << r.algorithm << ',' << r.p << ',' << r.m << ',' << r.k << ',' << r.n << ','
       << r.t << ',' << r.e << ',' << std::fixed << std::setprecision(6)
       << r.seconds_multiply << ',' << r.seconds_convert << ',' << r.checksum;
    return os.str();
}

inline std::uint32_t residue_checksum(const ResidueMatrix& m) {
    std::uint32_t sum = 0;
    for (Residue v : m.data) sum += v;   // wraps mod 2^32
    return sum;
}

namespace detail {

template <class F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// Run one algorithm `reps` times on seeded random inputs, timing the
/// word-product phase separately from compression, extraction and
/// reduction. `common_plan` overrides the planner for the common
/// algorithm (used to benchmark the e = 1 layout of the same kernel).
template <class B = DoubleWord>
std::vector<TimingRecord> run_bench(Algorithm algo, const PrimeModulus& mod,
                                    std::size_t m, std::size_t k, std::size_t n,
                                    int reps, std::uint64_t seed, int beta = 53,
                                    std::uint64_t kpanel = 0,
                                    const CompressionPlan* common_plan = nullptr) {
    const ResidueMatrix a = random_residue_matrix(m, k, mod, seed);
    const ResidueMatrix b = random_residue_matrix(k, n, mod, seed + 1);

    std::vector<TimingRecord> out;
    for (int rep = 0; rep < reps; ++rep) {
        TimingRecord rec;
        rec.algorithm = algorithm_name(algo);
        rec.p = mod.value();
        rec.m = m; rec.k = k; rec.n = n;

        switch (algo) {
            case Algorithm::Naive: {
                ResidueMatrix c(0, 0);
                rec.seconds_multiply = detail::timed([&] { c = naive_gemm(a, b, mod); });
                rec.checksum = residue_checksum(c);
                break;
            }
            case Algorithm::CommonCompressed: {
                const CompressionPlan plan =
                    common_plan ? *common_plan : plan_compression(mod, k, beta);
                rec.t = plan.t; rec.e = plan.e;
                std::optional<CompressedMatrix<B>> ca, cb;
                rec.seconds_convert = detail::timed([&] {
                    ca.emplace(compress_rows_reversed<B>(a, plan));
                    cb.emplace(compress_cols_forward<B>(b, plan));
                });
                std::vector<PackedWord<B>> acc;
                rec.seconds_multiply = detail::timed([&] {
                    acc = packed_common_product(*ca, *cb);
                });
                ResidueMatrix c(m, n);
                rec.seconds_convert += detail::timed([&] {
                    for (std::size_t i = 0; i < acc.size(); ++i)
                        c.data[i] = reduce_common_entry(acc[i], plan);
                });
                rec.checksum = residue_checksum(c);
                break;
            }
            case Algorithm::RightCompressed: {
                const CompressionPlan plan = plan_compression(mod, k, beta);
                rec.t = plan.t; rec.e = plan.e;
                std::optional<CompressedMatrix<B>> cb, cc;
                rec.seconds_convert = detail::timed([&] {
                    cb.emplace(compress_outer_cols<B>(b, plan));
                });
                rec.seconds_multiply = detail::timed([&] {
                    cc.emplace(packed_right_product(a, *cb));
                });
                ResidueMatrix c(0, 0);
                rec.seconds_convert += detail::timed([&] {
                    redq_in_place(*cc);
                    c = uncompress(*cc);
                });
                rec.checksum = residue_checksum(c);
                break;
            }
            case Algorithm::LeftCompressed: {
                const CompressionPlan plan = plan_compression(mod, k, beta);
                rec.t = plan.t; rec.e = plan.e;
                std::optional<CompressedMatrix<B>> ca, cc;
                rec.seconds_convert = detail::timed([&] {
                    ca.emplace(compress_outer_rows<B>(a, plan));
                });
                rec.seconds_multiply = detail::timed([&] {
                    cc.emplace(packed_left_product(*ca, b));
                });
                ResidueMatrix c(0, 0);
                rec.seconds_convert += detail::timed([&] {
                    redq_in_place(*cc);
                    c = uncompress(*cc);
                });
                rec.checksum = residue_checksum(c);
                break;
            }
            case Algorithm::FullCompressed: {
                const FullPlan fp = plan_full(mod, k, beta);
                rec.t = fp.base.t; rec.e = fp.base.e;
                PhaseSeconds phases;
                const ResidueMatrix c = mul_full_compressed<B>(a, b, fp, &phases);
                rec.seconds_multiply = phases.multiply;
                rec.seconds_convert = phases.convert;
                rec.checksum = residue_checksum(c);
                break;
            }
            case Algorithm::Blocked: {
                std::uint64_t kp = kpanel ? kpanel : choose_panel(mod, k, beta);
                if (kp == 0) kp = k;
                const CompressionPlan plan = kp >= 2 ? plan_compression(mod, kp, beta)
                                                     : uncompressed_plan(mod, 1, beta);
                rec.t = plan.t; rec.e = plan.e;
                PhaseSeconds phases;
                const ResidueMatrix c = blocked_accumulate<B>(a, b, plan, kp, &phases);
                rec.seconds_multiply = phases.multiply;
                rec.seconds_convert = phases.convert;
                rec.checksum = residue_checksum(c);
                break;
            }
        }
        out.push_back(rec);
    }
    return out;
}

} // namespace qgemm
