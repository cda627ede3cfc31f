#pragma once

#include <cstdint>
#include <string>

#include "qgemm/errors.hpp"

namespace qgemm {

/// A residue in the positive representation: an integer in [0, p-1].
/// 32 bits cover every prime a 53-bit word plan can ever accept.
using Residue = std::uint32_t;

/// Small prime modulus p together with (p-1)^2, the largest product of
/// two residues. All scalar arithmetic widens to 64 bits before
/// multiplying, so results are exact for every p this class accepts.
class PrimeModulus {
public:
    explicit PrimeModulus(std::uint32_t p) : p_(p) {
        if (p < 2 || !is_prime(p))
            throw InvalidModulus("modulus " + std::to_string(p) + " is not prime");
        pm1sq_ = static_cast<std::uint64_t>(p - 1) * (p - 1);
    }

    std::uint32_t value() const { return p_; }

    /// (p-1)^2, the bound on a single residue product.
    std::uint64_t pm1_squared() const { return pm1sq_; }

    /// x mod p for any nonnegative x.
    Residue reduce(std::uint64_t x) const {
        return static_cast<Residue>(x % p_);
    }

    /// (acc + a*b) mod p, exact for all residue inputs.
    Residue addmul(Residue acc, Residue a, Residue b) const {
        return reduce(acc + static_cast<std::uint64_t>(a) * b);
    }

    friend bool operator==(const PrimeModulus&, const PrimeModulus&) = default;

    static bool is_prime(std::uint64_t n) {
        if (n < 2) return false;
        if (n % 2 == 0) return n == 2;
        for (std::uint64_t f = 3; f * f <= n; f += 2)
            if (n % f == 0) return false;
        return true;
    }

private:
    std::uint32_t p_;
    std::uint64_t pm1sq_;
};

} // namespace qgemm
