#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qgemm/field.hpp"
#include "qgemm/plan.hpp"
#include "qgemm/word.hpp"

namespace qgemm {

/// Dense row-major matrix of residues.
struct ResidueMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Residue> data;

    ResidueMatrix() = default;
    ResidueMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    Residue& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    Residue at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    friend bool operator==(const ResidueMatrix&, const ResidueMatrix&) = default;
};

enum class PackDirection { Forward, Reversed };

/// Which logical axis of the matrix was shortened by packing.
enum class PackAxis { Row, Column };

struct PackOrientation {
    PackDirection direction = PackDirection::Forward;
    PackAxis axis = PackAxis::Column;
    int slots = 1;   ///< residues per word along the packed axis

    friend bool operator==(const PackOrientation&, const PackOrientation&) = default;
};

/// Dense row-major matrix of packed words plus enough metadata to undo
/// the packing: the uncompressed shape, the packed axis and direction,
/// and the plan the words were built under.
template <class B>
struct CompressedMatrix {
    std::size_t logical_rows;
    std::size_t logical_cols;
    std::size_t stored_rows;
    std::size_t stored_cols;
    PackOrientation orientation;
    CompressionPlan plan;
    std::vector<PackedWord<B>> data;

    CompressedMatrix(std::size_t lrows, std::size_t lcols,
                     std::size_t srows, std::size_t scols,
                     PackOrientation o, CompressionPlan pl)
        : logical_rows(lrows), logical_cols(lcols),
          stored_rows(srows), stored_cols(scols),
          orientation(o), plan(std::move(pl)), data(srows * scols) {}

    PackedWord<B>& at(std::size_t i, std::size_t j) { return data[i * stored_cols + j]; }
    PackedWord<B> at(std::size_t i, std::size_t j) const { return data[i * stored_cols + j]; }
};

} // namespace qgemm
