#pragma once

#include <cstdint>

#include "qgemm/field.hpp"
#include "qgemm/matrix.hpp"

namespace qgemm {

/// splitmix64: a small, fast PRNG with a fixed cross-platform sequence,
/// so seeded test and benchmark inputs are reproducible everywhere.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform-ish value in [0, bound). The modulo bias is below
    /// bound/2^64, negligible for the small bounds used here.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

inline ResidueMatrix random_residue_matrix(std::size_t rows, std::size_t cols,
                                           const PrimeModulus& mod, std::uint64_t seed) {
    ResidueMatrix m(rows, cols);
    SplitMix64 rng(seed);
    for (auto& v : m.data)
        v = static_cast<Residue>(rng.below(mod.value()));
    return m;
}

} // namespace qgemm
