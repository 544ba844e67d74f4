#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rsi/errors.hpp"

namespace rsi {

/// Dense real matrix, double precision, column-major storage.
class DenseMatrix {
public:
    DenseMatrix() = default;

    /// Zero-initialized rows x cols matrix.
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
        check_shape(rows, cols);
        data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    }

    /// Construct from column-major entries; rejects NaN/Inf.
    DenseMatrix(int rows, int cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        check_shape(rows, cols);
        if (data_.size() != static_cast<std::size_t>(rows) * cols)
            throw InvalidArgument("DenseMatrix: entry count does not match rows*cols");
        for (double v : data_)
            if (!std::isfinite(v)) throw InvalidArgument("DenseMatrix: non-finite entry");
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(int i, int j) noexcept { return data_[idx(i, j)]; }
    double operator()(int i, int j) const noexcept { return data_[idx(i, j)]; }

    double* col(int j) noexcept { return data_.data() + static_cast<std::size_t>(j) * rows_; }
    const double* col(int j) const noexcept {
        return data_.data() + static_cast<std::size_t>(j) * rows_;
    }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::size_t size() const noexcept { return data_.size(); }

    bool all_finite() const noexcept {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    static DenseMatrix identity(int n) {
        DenseMatrix I(n, n);
        for (int j = 0; j < n; ++j) I(j, j) = 1.0;
        return I;
    }

    static DenseMatrix from_diag(std::span<const double> d) {
        DenseMatrix D(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (int j = 0; j < D.cols(); ++j) D(j, j) = d[static_cast<std::size_t>(j)];
        return D;
    }

    bool operator==(const DenseMatrix& other) const = default;

private:
    static void check_shape(int rows, int cols) {
        if (rows < 1 || cols < 1)
            throw InvalidArgument("DenseMatrix: rows and cols must be >= 1");
    }
    std::size_t idx(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * rows_ + i;
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline double dot(const double* x, const double* y, int n) noexcept {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const double* x, int n) noexcept { return std::sqrt(dot(x, x, n)); }

/// C = A * B
inline DenseMatrix multiply(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.cols() != B.rows()) throw InvalidArgument("multiply: inner dimensions differ");
    DenseMatrix C(A.rows(), B.cols());
    const int m = A.rows(), k = A.cols(), n = B.cols();
    for (int j = 0; j < n; ++j) {
        double* cj = C.col(j);
        for (int t = 0; t < k; ++t) {
            const double b = B(t, j);
            if (b == 0.0) continue;
            const double* at = A.col(t);
            for (int i = 0; i < m; ++i) cj[i] += at[i] * b;
        }
    }
    return C;
}

/// C = A^T * B
inline DenseMatrix multiply_At_B(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != B.rows()) throw InvalidArgument("multiply_At_B: row counts differ");
    DenseMatrix C(A.cols(), B.cols());
    const int m = A.rows();
    for (int j = 0; j < B.cols(); ++j) {
        const double* bj = B.col(j);
        for (int i = 0; i < A.cols(); ++i) C(i, j) = dot(A.col(i), bj, m);
    }
    return C;
}

/// C = A * B^T
inline DenseMatrix multiply_A_Bt(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.cols() != B.cols()) throw InvalidArgument("multiply_A_Bt: column counts differ");
    DenseMatrix C(A.rows(), B.rows());
    const int m = A.rows(), k = A.cols(), n = B.rows();
    for (int t = 0; t < k; ++t) {
        const double* at = A.col(t);
        for (int j = 0; j < n; ++j) {
            const double b = B(j, t);
            if (b == 0.0) continue;
            double* cj = C.col(j);
            for (int i = 0; i < m; ++i) cj[i] += at[i] * b;
        }
    }
    return C;
}

inline DenseMatrix transpose(const DenseMatrix& A) {
    DenseMatrix T(A.cols(), A.rows());
    for (int j = 0; j < A.cols(); ++j)
        for (int i = 0; i < A.rows(); ++i) T(j, i) = A(i, j);
    return T;
}

inline DenseMatrix subtract(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw InvalidArgument("subtract: shape mismatch");
    DenseMatrix C(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.size(); ++i) C.data()[i] = A.data()[i] - B.data()[i];
    return C;
}

/// Columns [j0, j1) of A as a new matrix.
inline DenseMatrix columns(const DenseMatrix& A, int j0, int j1) {
    if (j0 < 0 || j1 > A.cols() || j0 >= j1) throw InvalidArgument("columns: bad range");
    DenseMatrix C(A.rows(), j1 - j0);
    for (int j = j0; j < j1; ++j)
        std::copy(A.col(j), A.col(j) + A.rows(), C.col(j - j0));
    return C;
}

/// A with column j scaled by d[j] (A * diag(d)).
inline DenseMatrix scale_columns(const DenseMatrix& A, std::span<const double> d) {
    if (static_cast<int>(d.size()) != A.cols())
        throw InvalidArgument("scale_columns: diagonal length mismatch");
    DenseMatrix C = A;
    for (int j = 0; j < A.cols(); ++j) {
        double* cj = C.col(j);
        for (int i = 0; i < A.rows(); ++i) cj[i] *= d[static_cast<std::size_t>(j)];
    }
    return C;
}

/// diag(d) * A (row scaling).
inline DenseMatrix scale_rows(const DenseMatrix& A, std::span<const double> d) {
    if (static_cast<int>(d.size()) != A.rows())
        throw InvalidArgument("scale_rows: diagonal length mismatch");
    DenseMatrix C = A;
    for (int j = 0; j < A.cols(); ++j) {
        double* cj = C.col(j);
        for (int i = 0; i < A.rows(); ++i) cj[i] *= d[static_cast<std::size_t>(i)];
    }
    return C;
}

inline double frobenius(const DenseMatrix& A) noexcept {
    return norm2(A.data(), static_cast<int>(A.size()));
}

inline double max_abs(const DenseMatrix& A) noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) m = std::max(m, std::abs(A.data()[i]));
    return m;
}

/// max |(A^T A - I)_{ij}|, the orthonormality defect of A's columns.
inline double orthonormality_defect(const DenseMatrix& A) {
    DenseMatrix G = multiply_At_B(A, A);
    for (int j = 0; j < G.cols(); ++j) G(j, j) -= 1.0;
    return max_abs(G);
}

} // namespace rsi
