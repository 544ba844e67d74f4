#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "rsi/matrix.hpp"

namespace rsi {

enum class MatrixMarketFormat { array, coordinate };

/// Write A in Matrix Market text form. Array format stores the dense
/// column-major entries; coordinate format stores nonzeros only.
inline void write_matrix_market(std::ostream& os, const DenseMatrix& A,
                                MatrixMarketFormat fmt = MatrixMarketFormat::array) {
    char buf[64];
    if (fmt == MatrixMarketFormat::array) {
        os << "%%MatrixMarket matrix array real general\n";
        os << A.rows() << " " << A.cols() << "\n";
        for (int j = 0; j < A.cols(); ++j)
            for (int i = 0; i < A.rows(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", A(i, j));
                os << buf << "\n";
            }
    } else {
        std::size_t nnz = 0;
        for (std::size_t i = 0; i < A.size(); ++i)
            if (A.data()[i] != 0.0) ++nnz;
        os << "%%MatrixMarket matrix coordinate real general\n";
        os << A.rows() << " " << A.cols() << " " << nnz << "\n";
        for (int j = 0; j < A.cols(); ++j)
            for (int i = 0; i < A.rows(); ++i)
                if (A(i, j) != 0.0) {
                    std::snprintf(buf, sizeof(buf), "%.17g", A(i, j));
                    os << (i + 1) << " " << (j + 1) << " " << buf << "\n";
                }
    }
}

inline void write_matrix_market(const std::string& path, const DenseMatrix& A,
                                MatrixMarketFormat fmt = MatrixMarketFormat::array) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("write_matrix_market: cannot open " + path);
    write_matrix_market(os, A, fmt);
}

/// Read a real general matrix in either array or coordinate format.
inline DenseMatrix read_matrix_market(std::istream& is) {
    std::string banner;
    if (!std::getline(is, banner) || banner.rfind("%%MatrixMarket", 0) != 0)
        throw InvalidArgument("read_matrix_market: missing banner");
    std::istringstream hs(banner);
    std::string tag, object, format, field, symmetry;
    hs >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || field != "real" || symmetry != "general")
        throw InvalidArgument("read_matrix_market: only 'matrix ... real general' supported");
    const bool coordinate = format == "coordinate";
    if (!coordinate && format != "array")
        throw InvalidArgument("read_matrix_market: unknown format " + format);

    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream dims(line);
    int rows = 0, cols = 0;
    long long nnz = 0;
    dims >> rows >> cols;
    if (coordinate) dims >> nnz;
    if (rows < 1 || cols < 1) throw InvalidArgument("read_matrix_market: bad dimensions");

    DenseMatrix A(rows, cols);
    if (coordinate) {
        for (long long e = 0; e < nnz; ++e) {
            int i = 0, j = 0;
            double v = 0.0;
            if (!(is >> i >> j >> v))
                throw InvalidArgument("read_matrix_market: truncated coordinate data");
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw InvalidArgument("read_matrix_market: index out of range");
            A(i - 1, j - 1) = v;
        }
    } else {
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) {
                double v = 0.0;
                if (!(is >> v)) throw InvalidArgument("read_matrix_market: truncated array data");
                A(i, j) = v;
            }
    }
    if (!A.all_finite()) throw InvalidArgument("read_matrix_market: non-finite entry");
    return A;
}

inline DenseMatrix read_matrix_market(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("read_matrix_market: cannot open " + path);
    return read_matrix_market(is);
}

} // namespace rsi
