#pragma once

#include <stdexcept>

namespace qgemm {

/// Base class for all qgemm errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The modulus is not a prime (or is < 2).
struct InvalidModulus : Error { using Error::Error; };

/// The requested (p, k, beta) fits fewer than two residues per word.
struct NoCompression : Error { using Error::Error; };

/// More residues passed than the plan has slots.
struct SlotOverflow : Error { using Error::Error; };

/// Word value too large to split into e digits (>= Q^e).
struct DigitOverflow : Error { using Error::Error; };

/// Matrix shapes do not agree.
struct DimensionMismatch : Error { using Error::Error; };

/// A plan was used with matrices it cannot legally pack.
struct PlanMismatch : Error { using Error::Error; };

/// No operation-count formula for the requested algorithm.
struct UnsupportedAlgorithm : Error { using Error::Error; };

/// A matrix file could not be parsed.
struct ParseError : Error { using Error::Error; };

} // namespace qgemm
