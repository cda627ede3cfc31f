// Command line front end: plan inspection, file-based multiplication,
// cross-verification against the naive oracle, and benchmark CSV output.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
// 3 plan infeasible.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qgemm/qgemm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

struct PlanArgs {
    std::uint32_t p = 0;
    std::uint64_t k = 0;
    int bits = 53;
    bool full = false;
    bool add_high_bits = false;
};

struct GemmArgs {
    std::string algo;
    std::string a_path, b_path, out_path;
    std::uint32_t p = 0;          // optional cross-check against file headers
    int bits = 53;
    std::uint64_t kpanel = 0;
};

struct VerifyArgs {
    std::uint32_t p = 0;
    std::size_t max_dim = 32;
    std::uint64_t seeds = 100;
    int bits = 53;
};

struct BenchArgs {
    std::uint32_t p = 0;
    std::size_t m = 0, k = 0, n = 0;
    std::string algo;
    int reps = 1;
    std::uint64_t seed = 0;
    int bits = 53;
    std::uint64_t kpanel = 0;
};

qgemm::Algorithm parse_algorithm(const std::string& name) {
    using qgemm::Algorithm;
    if (name == "naive") return Algorithm::Naive;
    if (name == "common") return Algorithm::CommonCompressed;
    if (name == "right") return Algorithm::RightCompressed;
    if (name == "left") return Algorithm::LeftCompressed;
    if (name == "full") return Algorithm::FullCompressed;
    if (name == "blocked") return Algorithm::Blocked;
    throw std::invalid_argument("unknown algorithm '" + name +
                                "' (expected naive|common|right|left|full|blocked)");
}

int cmd_plan(const PlanArgs& args) {
    const qgemm::PrimeModulus mod(args.p);
    if (args.full) {
        const qgemm::FullPlan fp = qgemm::plan_full(mod, args.k, args.bits);
        std::cout << "p        " << args.p << "\n"
                  << "k        " << args.k << "\n"
                  << "beta     " << fp.base.beta << "\n"
                  << "t        " << fp.base.t << "\n"
                  << "Q        2^" << fp.base.t << "\n"
                  << "dq+1     " << fp.q_slots() << "\n"
                  << "dtheta+1 " << fp.theta_slots() << "\n"
                  << "Theta    2^" << fp.theta_exponent << "\n"
                  << "digits   " << fp.base.e << "\n"
                  << "kmax     " << fp.base.kmax << "\n";
        return kExitOk;
    }
    const auto mode = args.add_high_bits ? qgemm::ExtractionMode::AddHighBits
                                         : qgemm::ExtractionMode::ReciprocalMul;
    const qgemm::CompressionPlan plan = qgemm::plan_compression(mod, args.k, args.bits, mode);
    std::cout << "p        " << args.p << "\n"
              << "k        " << args.k << "\n"
              << "beta     " << plan.beta << "\n"
              << "t        " << plan.t << "\n"
              << "Q        2^" << plan.t << "\n"
              << "d        " << plan.d << "\n"
              << "e        " << plan.e << "\n"
              << "kmax     " << plan.kmax << "\n";
    return kExitOk;
}

template <class B>
int run_gemm(const GemmArgs& args, int beta) {
    using namespace qgemm;
    const MatrixFile fa = read_matrix_file(args.a_path);
    const MatrixFile fb = read_matrix_file(args.b_path);
    if (fa.p != fb.p)
        throw ParseError("moduli disagree: " + args.a_path + " has p=" + std::to_string(fa.p) +
                         ", " + args.b_path + " has p=" + std::to_string(fb.p));
    if (args.p != 0 && args.p != fa.p)
        throw ParseError("--p " + std::to_string(args.p) + " does not match file modulus " +
                         std::to_string(fa.p));
    const PrimeModulus mod(fa.p);
    const ResidueMatrix& a = fa.matrix;
    const ResidueMatrix& b = fb.matrix;
    if (a.cols != b.rows)
        throw DimensionMismatch("inner dimensions disagree: " + args.a_path + " is " +
                                std::to_string(a.rows) + "x" + std::to_string(a.cols) + ", " +
                                args.b_path + " is " +
                                std::to_string(b.rows) + "x" + std::to_string(b.cols));

    const Algorithm algo = parse_algorithm(args.algo);
    ResidueMatrix c(0, 0);
    switch (algo) {
        case Algorithm::Naive:
            c = naive_gemm(a, b, mod);
            break;
        case Algorithm::CommonCompressed:
            c = mul_common_compressed<B>(a, b, plan_compression(mod, a.cols, beta));
            break;
        case Algorithm::RightCompressed: {
            const auto plan = plan_packed_axis(mod, a.cols, b.cols, beta);
            c = uncompress(mul_right_compressed(a, compress_outer_cols<B>(b, plan)));
            break;
        }
        case Algorithm::LeftCompressed: {
            const auto plan = plan_packed_axis(mod, a.cols, a.rows, beta);
            c = uncompress(mul_left_compressed(compress_outer_rows<B>(a, plan), b));
            break;
        }
        case Algorithm::FullCompressed:
            c = mul_full_compressed<B>(a, b, plan_full(mod, a.cols, beta));
            break;
        case Algorithm::Blocked: {
            std::uint64_t kp = args.kpanel ? args.kpanel : choose_panel(mod, a.cols, beta);
            if (kp == 0) kp = a.cols;
            const auto plan = kp >= 2 ? plan_compression(mod, kp, beta)
                                      : uncompressed_plan(mod, 1, beta);
            c = blocked_accumulate<B>(a, b, plan, kp);
            break;
        }
    }
    write_matrix_file(args.out_path, c, fa.p);
    return kExitOk;
}

int cmd_verify(const VerifyArgs& args) {
    using namespace qgemm;
    const PrimeModulus mod(args.p);
    if (args.max_dim < 1) throw std::invalid_argument("--max-dim must be >= 1");
    const auto results = run_verify(mod, args.max_dim, args.seeds, args.bits);
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << algorithm_name(r.algorithm) << "\t" << r.backend << "\t";
        if (r.passed) {
            std::cout << "ok (" << r.cases << " cases";
            if (r.skipped) std::cout << ", " << r.skipped << " skipped";
            std::cout << ")\n";
        } else {
            all_ok = false;
            std::cout << "FAIL seed=" << r.seed << " dims=" << r.m << "x" << r.k << "x" << r.n
                      << " at (" << r.row << "," << r.col << "): got " << r.got
                      << " want " << r.want << "\n";
        }
    }
    return all_ok ? kExitOk : kExitVerifyFailed;
}

template <class B>
int run_bench(const BenchArgs& args, int beta) {
    using namespace qgemm;
    const PrimeModulus mod(args.p);
    const Algorithm algo = parse_algorithm(args.algo);
    const auto records = qgemm::run_bench<B>(algo, mod, args.m, args.k, args.n,
                                             args.reps, args.seed, beta, args.kpanel);
    std::cout << timing_csv_header() << "\n";
    for (const auto& r : records)
        std::cout << to_csv_row(r) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compressed matrix multiplication over small prime fields"};
    app.require_subcommand(1);

    PlanArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "show packing parameters for (p, k)");
    plan_cmd->add_option("--p", plan_args.p, "prime modulus")->required();
    plan_cmd->add_option("--k", plan_args.k, "common dimension")->required();
    plan_cmd->add_option("--bits", plan_args.bits, "exact word bits (default 53)");
    plan_cmd->add_flag("--full", plan_args.full, "plan a two-axis packing");
    plan_cmd->add_flag("--add-high-bits", plan_args.add_high_bits,
                       "account for the additive extraction variant (smaller kmax)");

    GemmArgs gemm_args;
    auto* gemm_cmd = app.add_subcommand("gemm", "multiply two matrix files");
    gemm_cmd->add_option("--algo", gemm_args.algo, "naive|common|right|left|full|blocked")->required();
    gemm_cmd->add_option("--a", gemm_args.a_path, "left matrix file")->required();
    gemm_cmd->add_option("--b", gemm_args.b_path, "right matrix file")->required();
    gemm_cmd->add_option("--out", gemm_args.out_path, "output matrix file")->required();
    gemm_cmd->add_option("--p", gemm_args.p, "expected modulus (cross-checked against files)");
    gemm_cmd->add_option("--bits", gemm_args.bits, "exact word bits (default 53)");
    gemm_cmd->add_option("--kpanel", gemm_args.kpanel, "panel width for --algo blocked");

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "cross-check all algorithms against the oracle");
    verify_cmd->add_option("--p", verify_args.p, "prime modulus")->required();
    verify_cmd->add_option("--max-dim", verify_args.max_dim, "largest random dimension");
    verify_cmd->add_option("--seeds", verify_args.seeds, "number of seeded cases");
    verify_cmd->add_option("--bits", verify_args.bits, "exact word bits (default 53)");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "time one algorithm, CSV to stdout");
    bench_cmd->add_option("--p", bench_args.p, "prime modulus")->required();
    bench_cmd->add_option("--m", bench_args.m, "rows of A")->required();
    bench_cmd->add_option("--k", bench_args.k, "common dimension")->required();
    bench_cmd->add_option("--n", bench_args.n, "columns of B")->required();
    bench_cmd->add_option("--algo", bench_args.algo, "naive|common|right|left|full|blocked")->required();
    bench_cmd->add_option("--reps", bench_args.reps, "repetitions (default 1)");
    bench_cmd->add_option("--seed", bench_args.seed, "input seed (default 0)");
    bench_cmd->add_option("--bits", bench_args.bits, "exact word bits (default 53)");
    bench_cmd->add_option("--kpanel", bench_args.kpanel, "panel width for --algo blocked");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (plan_cmd->parsed()) return cmd_plan(plan_args);
        if (verify_cmd->parsed()) return cmd_verify(verify_args);
        if (gemm_cmd->parsed()) {
            if (gemm_args.bits <= qgemm::DoubleWord::exact_bits)
                return run_gemm<qgemm::DoubleWord>(gemm_args, gemm_args.bits);
            if (gemm_args.bits <= qgemm::Int64Word::exact_bits)
                return run_gemm<qgemm::Int64Word>(gemm_args, gemm_args.bits);
            throw std::invalid_argument("--bits must be at most 63");
        }
        if (bench_cmd->parsed()) {
            if (bench_args.bits <= qgemm::DoubleWord::exact_bits)
                return run_bench<qgemm::DoubleWord>(bench_args, bench_args.bits);
            if (bench_args.bits <= qgemm::Int64Word::exact_bits)
                return run_bench<qgemm::Int64Word>(bench_args, bench_args.bits);
            throw std::invalid_argument("--bits must be at most 63");
        }
    } catch (const qgemm::NoCompression& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (gemm_cmd->parsed() || bench_cmd->parsed())
            std::cerr << "hint: --algo blocked splits the common dimension into legal panels\n";
        return kExitInfeasible;
    } catch (const qgemm::PlanMismatch& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: --algo blocked splits the common dimension into legal panels\n";
        return kExitInfeasible;
    } catch (const qgemm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
