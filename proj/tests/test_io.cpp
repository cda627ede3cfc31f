#include <doctest.h>

#include <sstream>

#include "qgemm/bench.hpp"
#include "qgemm/matrix_io.hpp"
#include "qgemm/prng.hpp"

using namespace qgemm;

TEST_CASE("matrix files round-trip exactly") {
    const PrimeModulus p11(11);
    SplitMix64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t rows = rng.below(12), cols = rng.below(12);
        const auto m = random_residue_matrix(rows, cols, p11, trial + 500);
        std::stringstream ss;
        write_matrix(ss, m, 11);
        const MatrixFile parsed = read_matrix(ss);
        CHECK(parsed.p == 11);
        CHECK(parsed.matrix == m);
    }
}

TEST_CASE("matrix parser rejects malformed input") {
    auto parse = [](const char* text) {
        std::istringstream in(text);
        return read_matrix(in);
    };
    CHECK_THROWS_AS(parse("X 3 1 1\n0\n"), ParseError);          // wrong magic
    CHECK_THROWS_AS(parse("M 1 1 1\n0\n"), ParseError);          // p < 2
    CHECK_THROWS_AS(parse("M 3 2 2\n0 1 2\n"), ParseError);      // too few values
    CHECK_THROWS_AS(parse("M 3 1 2\n0 3\n"), ParseError);        // out of range
    CHECK_THROWS_AS(parse("M 3 1 2\n0 1 2\n"), ParseError);      // trailing values
    CHECK_THROWS_AS(parse("M 3 1 -2\n"), ParseError);            // negative extent
    CHECK_NOTHROW(parse("M 3 0 4\n"));                           // empty body is fine
}

TEST_CASE("seeded matrices are reproducible") {
    const PrimeModulus p7(7);
    CHECK(random_residue_matrix(6, 6, p7, 42) == random_residue_matrix(6, 6, p7, 42));
    CHECK_FALSE(random_residue_matrix(6, 6, p7, 42) == random_residue_matrix(6, 6, p7, 43));
}

TEST_CASE("timing records serialize with a stable column order") {
    CHECK(std::string(timing_csv_header()) ==
          "algorithm,p,m,k,n,t,e,seconds_multiply,seconds_convert,checksum");
    TimingRecord r;
    r.algorithm = "common";
    r.p = 3; r.m = 4; r.k = 5; r.n = 6; r.t = 7; r.e = 2;
    r.seconds_multiply = 0.25;
    r.seconds_convert = 0.125;
    r.checksum = 99;
    CHECK(to_csv_row(r) == "common,3,4,5,6,7,2,0.250000,0.125000,99");
}

TEST_CASE("benchmarks of different algorithms agree on the checksum") {
    const PrimeModulus p3(3);
    std::uint32_t checksum = 0;
    bool first = true;
    for (Algorithm algo : {Algorithm::Naive, Algorithm::CommonCompressed,
                           Algorithm::RightCompressed, Algorithm::LeftCompressed,
                           Algorithm::FullCompressed, Algorithm::Blocked}) {
        const auto records = run_bench<DoubleWord>(algo, p3, 24, 24, 24, 2, 7);
        REQUIRE(records.size() == 2);
        for (const auto& r : records) {
            CHECK(r.seconds_multiply >= 0);
            CHECK(r.seconds_convert >= 0);
            if (first) { checksum = r.checksum; first = false; }
            CHECK(r.checksum == checksum);
        }
    }
    // both backends agree as well
    const auto ir = run_bench<Int64Word>(Algorithm::CommonCompressed, p3, 24, 24, 24, 1, 7, 63);
    REQUIRE(ir.size() == 1);
    CHECK(ir[0].checksum == checksum);
}
