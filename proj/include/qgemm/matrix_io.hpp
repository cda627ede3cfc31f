#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qgemm/errors.hpp"
#include "qgemm/field.hpp"
#include "qgemm/matrix.hpp"

namespace qgemm {

/// Matrix files are plain text for diffability:
///
///     M <p> <rows> <cols>
///     <row-major residues, whitespace separated>
///
/// Every value must lie in [0, p-1].
struct MatrixFile {
    std::uint32_t p;
    ResidueMatrix matrix;
};

inline MatrixFile read_matrix(std::istream& in) {
    std::string magic;
    if (!(in >> magic) || magic != "M")
        throw ParseError("matrix file must start with 'M <p> <rows> <cols>'");
    long long p = 0, rows = -1, cols = -1;
    if (!(in >> p >> rows >> cols) || p < 2 || rows < 0 || cols < 0)
        throw ParseError("bad matrix header");

    MatrixFile mf{static_cast<std::uint32_t>(p),
                  ResidueMatrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols))};
    for (std::size_t i = 0; i < mf.matrix.data.size(); ++i) {
        long long v;
        if (!(in >> v))
            throw ParseError("expected " + std::to_string(mf.matrix.data.size()) +
                             " values, got " + std::to_string(i));
        if (v < 0 || v >= p)
            throw ParseError("value " + std::to_string(v) + " out of range [0, " +
                             std::to_string(p - 1) + "]");
        mf.matrix.data[i] = static_cast<Residue>(v);
    }
    long long extra;
    if (in >> extra)
        throw ParseError("trailing values after " + std::to_string(mf.matrix.data.size()) +
                         " entries");
    return mf;
}

inline MatrixFile read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return read_matrix(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_matrix(std::ostream& out, const ResidueMatrix& m, std::uint32_t p) {
    out << "M " << p << ' ' << m.rows << ' ' << m.cols << '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j)
            out << m.at(i, j) << (j + 1 == m.cols ? '\n' : ' ');
    }
}

inline void write_matrix_file(const std::string& path, const ResidueMatrix& m, std::uint32_t p) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    write_matrix(out, m, p);
}

} // namespace qgemm
