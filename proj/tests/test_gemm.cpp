#include <doctest.h>

#include <cmath>

#include "qgemm/gemm.hpp"
#include "qgemm/prng.hpp"
#include "qgemm/verify.hpp"

using namespace qgemm;

namespace {

CompressionPlan make_plan(std::uint32_t p, int t, int e, int beta = 53) {
    CompressionPlan plan{PrimeModulus(p)};
    plan.t = t;
    plan.e = e;
    plan.d = e - 1;
    plan.beta = beta;
    plan.kmax = ((std::uint64_t{1} << t) - 1) / plan.modulus.pm1_squared();
    plan.inv_qd = std::ldexp(1.0, -t * plan.d);
    return plan;
}

ResidueMatrix from_rows(std::size_t rows, std::size_t cols, std::initializer_list<Residue> vals) {
    ResidueMatrix m(rows, cols);
    std::copy(vals.begin(), vals.end(), m.data.begin());
    return m;
}

ResidueMatrix identity(std::size_t n) {
    ResidueMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

const ResidueMatrix kA = from_rows(2, 2, {1, 2, 0, 1});
const ResidueMatrix kB = from_rows(2, 2, {2, 0, 1, 1});
const ResidueMatrix kC = from_rows(2, 2, {1, 2, 1, 1});  // A*B mod 3, by hand

} // namespace

TEST_CASE("naive oracle") {
    const PrimeModulus p3(3);
    CHECK(naive_gemm(kA, kB, p3) == kC);
    const auto r = random_residue_matrix(5, 4, p3, 11);
    CHECK(naive_gemm(identity(5), r, p3) == r);
    const ResidueMatrix zero(3, 5);
    CHECK(naive_gemm(zero, random_residue_matrix(5, 2, p3, 12), p3) == ResidueMatrix(3, 2));
    CHECK_THROWS_AS(naive_gemm(ResidueMatrix(2, 3), ResidueMatrix(2, 3), p3), DimensionMismatch);
}

TEST_CASE("naive oracle reduces long accumulations exactly") {
    // k far past the periodic-reduction threshold
    const PrimeModulus p5(5);
    const std::size_t k = 5000;
    ResidueMatrix a(1, k), b(k, 1);
    for (std::size_t i = 0; i < k; ++i) { a.data[i] = 4; b.data[i] = 4; }
    const auto c = naive_gemm(a, b, p5);
    CHECK(c.at(0, 0) == (16 * k) % 5);
}

TEST_CASE_TEMPLATE("row and column packing layouts", B, DoubleWord, Int64Word) {
    const auto plan = make_plan(3, 5, 2);

    const auto ca = compress_rows_reversed<B>(from_rows(1, 2, {1, 2}), plan);
    REQUIRE(ca.stored_cols == 1);
    CHECK(ca.at(0, 0).value == B::from_u64(34));

    const auto ca_short = compress_rows_reversed<B>(from_rows(1, 1, {1}), plan);
    CHECK(ca_short.at(0, 0).value == B::from_u64(32));

    const auto zeros = compress_rows_reversed<B>(ResidueMatrix(2, 4), plan);
    CHECK(zeros.stored_rows == 2);
    CHECK(zeros.stored_cols == 2);
    for (const auto& w : zeros.data) CHECK(w.value == B::from_u64(0));

    const auto cb = compress_cols_forward<B>(from_rows(2, 1, {2, 1}), plan);
    REQUIRE(cb.stored_rows == 1);
    CHECK(cb.at(0, 0).value == B::from_u64(34));

    const auto cbi = compress_cols_forward<B>(identity(2), plan);
    CHECK(cbi.at(0, 0).value == B::from_u64(1));
    CHECK(cbi.at(0, 1).value == B::from_u64(32));

    const auto single_row = compress_cols_forward<B>(from_rows(1, 2, {2, 1}), plan);
    CHECK(single_row.at(0, 0).value == B::from_u64(2));
    CHECK(single_row.at(0, 1).value == B::from_u64(1));

    // eight columns exceed kmax = 7 at Q = 32
    CHECK_THROWS_AS(compress_rows_reversed<B>(ResidueMatrix(1, 8), plan), PlanMismatch);
}

TEST_CASE_TEMPLATE("uncompress inverts every packing", B, DoubleWord, Int64Word) {
    const PrimeModulus p5(5);
    SplitMix64 rng(321);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t rows = 1 + rng.below(9), cols = 1 + rng.below(9);
        const auto m = random_residue_matrix(rows, cols, p5, trial);
        const auto plan = make_plan(5, 9, 3);  // kmax = 31 covers every sampled extent
        CHECK(uncompress(compress_rows_reversed<B>(m, plan)) == m);
        CHECK(uncompress(compress_cols_forward<B>(m, plan)) == m);
        CHECK(uncompress(compress_outer_cols<B>(m, plan)) == m);
        CHECK(uncompress(compress_outer_rows<B>(m, plan)) == m);
    }
}

TEST_CASE_TEMPLATE("common-dimension product", B, DoubleWord, Int64Word) {
    const auto plan = make_plan(3, 5, 2);
    CHECK(mul_common_compressed<B>(kA, kB, plan) == kC);

    const PrimeModulus p7(7);
    const auto plan7 = plan_compression(p7, 4, 53);
    CHECK(mul_common_compressed<B>(identity(4), identity(4), plan7) == identity(4));

    // extreme magnitude at the exact kmax edge
    for (const auto& p : {make_plan(3, 5, 2), make_plan(3, 10, 5), make_plan(3, 17, 3)}) {
        const std::uint64_t k = p.kmax;
        ResidueMatrix a(1, k), b(k, 1);
        for (std::size_t i = 0; i < k; ++i) {
            a.data[i] = p.p() - 1;
            b.data[i] = p.p() - 1;
        }
        const auto c = mul_common_compressed<B>(a, b, p);
        CHECK(c.at(0, 0) == (k * p.modulus.pm1_squared()) % p.p());
    }

    CHECK_THROWS_AS(mul_common_compressed<B>(ResidueMatrix(2, 3), ResidueMatrix(2, 3), plan),
                    DimensionMismatch);
}

TEST_CASE_TEMPLATE("pre-compressed and repacked entry points", B, DoubleWord, Int64Word) {
    const auto plan = make_plan(3, 5, 2);
    const auto ca = compress_rows_reversed<B>(kA, plan);
    const auto cb = compress_cols_forward<B>(kB, plan);
    CHECK(mul_common_compressed(ca, cb) == kC);

    const auto cc = mul_common_repacked<B>(kA, kB, plan);
    CHECK(cc.logical_rows == 2);
    CHECK(cc.logical_cols == 2);
    CHECK(uncompress(cc) == kC);

    // mixing incompatible plans is refused
    const auto other = compress_cols_forward<B>(kB, make_plan(3, 7, 2));
    CHECK_THROWS_AS(mul_common_compressed(ca, other), PlanMismatch);
    // wrong orientation is refused
    CHECK_THROWS_AS(packed_common_product(cb, cb), PlanMismatch);
}

TEST_CASE_TEMPLATE("right compression", B, DoubleWord, Int64Word) {
    const auto plan = make_plan(3, 5, 2);
    const auto cb = compress_outer_cols<B>(kB, plan);
    REQUIRE(cb.stored_cols == 1);
    CHECK(cb.at(0, 0).value == B::from_u64(2));    // [2, 0] forward
    CHECK(cb.at(1, 0).value == B::from_u64(33));   // [1, 1] forward

    const auto cc = mul_right_compressed(kA, cb);
    CHECK(uncompress(cc) == kC);

    // identity on the left leaves the packed operand unchanged
    const auto unchanged = mul_right_compressed(identity(2), cb);
    for (std::size_t i = 0; i < cb.data.size(); ++i)
        CHECK(unchanged.data[i].value == cb.data[i].value);

    // degenerate single column
    const PrimeModulus p5(5);
    const auto b1 = random_residue_matrix(6, 1, p5, 3);
    const auto a1 = random_residue_matrix(4, 6, p5, 4);
    const auto plan5 = plan_packed_axis(p5, 6, 1, 53);
    const auto c1 = uncompress(mul_right_compressed(a1, compress_outer_cols<B>(b1, plan5)));
    CHECK(c1 == naive_gemm(a1, b1, p5));

    // compressed left operand route
    const auto ca_fwd = compress_outer_cols<B>(kA, plan);
    CHECK(uncompress(mul_right_compressed(ca_fwd, cb)) == kC);
}

TEST_CASE_TEMPLATE("left compression", B, DoubleWord, Int64Word) {
    const auto plan = make_plan(3, 5, 2);
    const auto ca = compress_outer_rows<B>(kA, plan);
    REQUIRE(ca.stored_rows == 1);
    CHECK(ca.at(0, 0).value == B::from_u64(1));    // column [1, 0]
    CHECK(ca.at(0, 1).value == B::from_u64(34));   // column [2, 1]

    const auto cc = mul_left_compressed(ca, kB);
    CHECK(cc.at(0, 0).value == B::from_u64(33));   // digits [1, 1]
    CHECK(cc.at(0, 1).value == B::from_u64(34));   // digits [2, 1]
    CHECK(uncompress(cc) == kC);

    // identity on the right recovers A
    CHECK(uncompress(mul_left_compressed(ca, identity(2))) == kA);

    // single row degenerates to the plain row-vector product
    const PrimeModulus p5(5);
    const auto a1 = random_residue_matrix(1, 6, p5, 8);
    const auto b1 = random_residue_matrix(6, 5, p5, 9);
    const auto plan5 = plan_packed_axis(p5, 6, 1, 53);
    CHECK(uncompress(mul_left_compressed(compress_outer_rows<B>(a1, plan5), b1)) ==
          naive_gemm(a1, b1, p5));
}

TEST_CASE_TEMPLATE("full compression", B, DoubleWord, Int64Word) {
    // dq = dtheta = 1 at Q = 32, Theta = 2^10
    FullPlan fp{make_plan(3, 5, 4), 1, 1, 10};
    CHECK(mul_full_compressed<B>(kA, kB, fp) == kC);

    const ResidueMatrix zero(2, 2);
    CHECK(mul_full_compressed<B>(zero, kB, fp) == zero);

    // 1 x k x 1: the dot product lands in digit (0, 0)
    const PrimeModulus p3(3);
    const auto a1 = random_residue_matrix(1, 7, p3, 5);
    const auto b1 = random_residue_matrix(7, 1, p3, 6);
    CHECK(mul_full_compressed<B>(a1, b1, plan_full(p3, 7, 53)) == naive_gemm(a1, b1, p3));
}

TEST_CASE_TEMPLATE("full compression digit independence", B, DoubleWord, Int64Word) {
    const PrimeModulus p5(5);
    const std::size_t m = 9, k = 10, n = 8;
    const auto fp = plan_full(p5, k, 53);
    auto a = random_residue_matrix(m, k, p5, 21);
    const auto b = random_residue_matrix(k, n, p5, 22);
    const auto before = mul_full_compressed<B>(a, b, fp);

    const std::size_t row = 4, col = 7;
    a.at(row, col) = (a.at(row, col) + 1) % 5;
    const auto after = mul_full_compressed<B>(a, b, fp);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == row) continue;
            CHECK(before.at(i, j) == after.at(i, j));  // only row `row` may move
        }
    CHECK(after == naive_gemm(a, b, p5));
}

TEST_CASE_TEMPLATE("panel blocking", B, DoubleWord, Int64Word) {
    const PrimeModulus p3(3);
    const auto plan = make_plan(3, 5, 2);  // kmax = 7

    // k twice past kmax must still be exact
    const std::size_t k = 14;
    const auto a = random_residue_matrix(3, k, p3, 31);
    const auto b = random_residue_matrix(k, 5, p3, 32);
    CHECK(blocked_accumulate<B>(a, b, plan, 7) == naive_gemm(a, b, p3));

    // a single panel equals the direct product
    const auto a2 = random_residue_matrix(4, 6, p3, 33);
    const auto b2 = random_residue_matrix(6, 4, p3, 34);
    CHECK(blocked_accumulate<B>(a2, b2, plan, 6) == mul_common_compressed<B>(a2, b2, plan));

    // rank-1 panels
    const auto e1 = uncompressed_plan(p3, 1, 53);
    CHECK(blocked_accumulate<B>(a2, b2, e1, 1) == naive_gemm(a2, b2, p3));

    CHECK_THROWS_AS(blocked_accumulate<B>(a, b, plan, 8), PlanMismatch);
}

TEST_CASE_TEMPLATE("all algorithms match the oracle on random inputs", B, DoubleWord, Int64Word) {
    const std::uint32_t primes[] = {2, 3, 5, 7, 11};
    const int beta = std::is_same_v<B, DoubleWord> ? 53 : 63;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const PrimeModulus mod(primes[seed % 5]);
        SplitMix64 dims(seed ^ 0x5eed);
        const std::size_t m = 1 + dims.below(32);
        const std::size_t k = 1 + dims.below(32);
        const std::size_t n = 1 + dims.below(32);
        const auto a = random_residue_matrix(m, k, mod, seed * 2 + 100);
        const auto b = random_residue_matrix(k, n, mod, seed * 2 + 101);
        const auto want = naive_gemm(a, b, mod);
        for (Algorithm algo : {Algorithm::CommonCompressed, Algorithm::RightCompressed,
                               Algorithm::LeftCompressed, Algorithm::FullCompressed,
                               Algorithm::Blocked}) {
            CAPTURE(static_cast<int>(algo));
            CAPTURE(seed);
            CHECK(detail::run_algorithm<B>(algo, a, b, mod, beta) == want);
        }
    }
}

TEST_CASE_TEMPLATE("partial compression: no dimension divisible by e", B, DoubleWord, Int64Word) {
    const PrimeModulus p7(7);
    const std::size_t m = 7, k = 13, n = 9;
    const auto plan = plan_compression(p7, k, 53);  // e = 5: divides none of m, k, n
    REQUIRE(plan.e == 5);
    const auto a = random_residue_matrix(m, k, p7, 41);
    const auto b = random_residue_matrix(k, n, p7, 42);
    const auto want = naive_gemm(a, b, p7);
    CHECK(mul_common_compressed<B>(a, b, plan) == want);
    CHECK(uncompress(mul_right_compressed(a, compress_outer_cols<B>(b, plan))) == want);
    CHECK(uncompress(mul_left_compressed(compress_outer_rows<B>(a, plan), b)) == want);
    CHECK(mul_full_compressed<B>(a, b, plan_full(p7, k, 53)) == want);
    CHECK(blocked_accumulate<B>(a, b, plan_compression(p7, 5, 53), 5) == want);
}

TEST_CASE_TEMPLATE("identical inputs give bitwise-identical outputs", B, DoubleWord, Int64Word) {
    const PrimeModulus p11(11);
    const auto a = random_residue_matrix(17, 23, p11, 51);
    const auto b = random_residue_matrix(23, 19, p11, 52);
    const int beta = std::is_same_v<B, DoubleWord> ? 53 : 63;
    for (Algorithm algo : {Algorithm::CommonCompressed, Algorithm::RightCompressed,
                           Algorithm::LeftCompressed, Algorithm::FullCompressed,
                           Algorithm::Blocked}) {
        const auto once = detail::run_algorithm<B>(algo, a, b, p11, beta);
        const auto twice = detail::run_algorithm<B>(algo, a, b, p11, beta);
        CHECK(once == twice);
    }
}
