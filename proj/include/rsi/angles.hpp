#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rsi/matrix.hpp"
#include "rsi/norms.hpp"
#include "rsi/svd.hpp"

namespace rsi {

/// Canonical angles between two subspaces, index-aligned so that
/// sines[j] = sin(theta_{j+1}) with 0 <= theta_1 <= ... <= theta_k <= pi/2.
struct AngleSet {
    std::vector<double> sines;   ///< ascending (ascending angle order)
    std::vector<double> cosines; ///< descending, paired with sines
    int dim_m = 0;               ///< dim of the larger subspace
    int dim_n = 0;               ///< dim of the smaller subspace

    /// Sines in descending order (largest angle first), the gauge input order.
    std::vector<double> sines_descending() const {
        return {sines.rbegin(), sines.rend()};
    }
};

namespace detail {

inline void require_orthonormal(const DenseMatrix& M, const char* who) {
    if (orthonormality_defect(M) > 1e-10)
        throw InvalidArgument(std::string(who) + ": input columns not orthonormal");
}

// N - M (M^T N), the projection of N onto the complement of range(M).
inline DenseMatrix project_out(const DenseMatrix& M, const DenseMatrix& N) {
    return subtract(N, multiply(M, multiply_At_B(M, N)));
}

} // namespace detail

/// Canonical angles between range(M) and range(N); cols(M) >= cols(N).
/// Sines come from the singular values of (I - M M^T) N, which stays accurate
/// for small angles; cosines from the singular values of M^T N.
inline AngleSet canonical_angles(const DenseMatrix& M, const DenseMatrix& N) {
    if (M.rows() != N.rows()) throw InvalidArgument("canonical_angles: row counts differ");
    if (M.cols() < N.cols())
        throw InvalidArgument("canonical_angles: dim(M) must be >= dim(N)");
    detail::require_orthonormal(M, "canonical_angles");
    detail::require_orthonormal(N, "canonical_angles");

    const std::vector<double> s_desc = singular_values(detail::project_out(M, N));
    const std::vector<double> c_desc = singular_values(multiply_At_B(M, N));

    AngleSet out;
    out.dim_m = M.cols();
    out.dim_n = N.cols();
    out.sines.assign(s_desc.rbegin(), s_desc.rend());
    out.cosines = c_desc;
    for (double& s : out.sines) s = std::clamp(s, 0.0, 1.0);
    for (double& c : out.cosines) c = std::clamp(c, 0.0, 1.0);
    return out;
}

/// |||sin(angles(M, N))||| for a unitarily invariant norm.
inline double sin_angle_norm(const DenseMatrix& M, const DenseMatrix& N, const NormSpec& spec) {
    return gauge(canonical_angles(M, N).sines_descending(), spec);
}

/// sin of the angle between a unit vector and range(M): ||(I - M M^T) x||.
inline double vector_subspace_angle(const DenseMatrix& x, const DenseMatrix& M) {
    if (x.cols() != 1) throw InvalidArgument("vector_subspace_angle: x must be a column");
    if (x.rows() != M.rows()) throw InvalidArgument("vector_subspace_angle: row counts differ");
    const double nx = norm2(x.data(), x.rows());
    if (std::abs(nx - 1.0) > 1e-10)
        throw InvalidArgument("vector_subspace_angle: x must be a unit vector");
    DenseMatrix r = detail::project_out(M, x);
    return std::clamp(norm2(r.data(), r.rows()), 0.0, 1.0);
}

/// sin of the angle between the lines spanned by unit vectors x and y;
/// invariant under sign flips of either argument. Evaluated as the norm of
/// the residual x - (x^T y) y, which keeps full absolute accuracy for small
/// angles where sqrt(1 - (x^T y)^2) would bottom out near sqrt(eps).
inline double vector_vector_angle(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.cols() != 1 || y.cols() != 1)
        throw InvalidArgument("vector_vector_angle: inputs must be columns");
    if (x.rows() != y.rows()) throw InvalidArgument("vector_vector_angle: row counts differ");
    const int n = x.rows();
    if (std::abs(norm2(x.data(), n) - 1.0) > 1e-10 || std::abs(norm2(y.data(), n) - 1.0) > 1e-10)
        throw InvalidArgument("vector_vector_angle: inputs must be unit vectors");
    const double c = dot(x.data(), y.data(), n);
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = x(i, 0) - c * y(i, 0);
    return std::clamp(norm2(r.data(), n), 0.0, 1.0);
}

} // namespace rsi
