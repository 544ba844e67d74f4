#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rsi/matrix.hpp"
#include "rsi/prng.hpp"
#include "rsi/qr.hpp"
#include "rsi/svd.hpp"

namespace rsi {

/// How the sketch Y = (A A^T)^q A Omega is orthonormalized.
/// `idealized` forms Y explicitly and factors once; `practical` interleaves a
/// thin QR after every application of A or A^T (2q+1 passes), which is the
/// robust default in the presence of round-off.
enum class SketchVariant { idealized, practical };

inline std::string to_string(SketchVariant v) {
    return v == SketchVariant::idealized ? "idealized" : "practical";
}

inline SketchVariant sketch_variant_from_string(const std::string& s) {
    if (s == "idealized") return SketchVariant::idealized;
    if (s == "practical") return SketchVariant::practical;
    throw InvalidArgument("unknown sketch variant '" + s + "'");
}

struct SketchConfig {
    int k = 0;                    ///< target rank
    int rho = 0;                  ///< oversampling, ell = k + rho columns drawn
    int q = 0;                    ///< power iterations
    std::uint64_t seed = 0;       ///< Gaussian guess seed
    SketchVariant variant = SketchVariant::practical;

    int ell() const { return k + rho; }
};

/// Output of the randomized subspace iteration: U_hat diag(sigma_hat) V_hat^T
/// equals Q Q^T A, with Q the orthonormal sketch basis.
struct ApproxSvd {
    DenseMatrix U_hat;               ///< m x ell
    std::vector<double> sigma_hat;   ///< ell, descending
    DenseMatrix V_hat;               ///< n x ell
    DenseMatrix Q;                   ///< m x ell
};

/// Rank-k truncation of the approximation (discards the rho smallest triplets).
struct TruncatedSvd {
    DenseMatrix U_k;
    std::vector<double> sigma_k;
    DenseMatrix V_k;
};

/// n x ell matrix of i.i.d. standard normals, filled column-major.
/// Identical seeds give bit-identical matrices (PRNG: kPrngVersion).
inline DenseMatrix gaussian_guess(int n, int ell, std::uint64_t seed) {
    if (ell < 1 || n < ell) throw InvalidArgument("gaussian_guess: need n >= ell >= 1");
    Prng rng(seed);
    DenseMatrix G(n, ell);
    for (int j = 0; j < ell; ++j) {
        double* gj = G.col(j);
        for (int i = 0; i < n; ++i) gj[i] = rng.normal();
    }
    return G;
}

namespace detail {

// Thin QR that also verifies the factored matrix has full numerical rank:
// diagonal entries of R below ell * ||Y||_2 * eps flag a deficient sketch.
inline DenseMatrix orthonormalize_checked(const DenseMatrix& Y) {
    QrFactors qr = thin_qr(Y);
    const int ell = Y.cols();
    DenseMatrix Rc = qr.R;
    jacobi_orthogonalize(Rc, nullptr);
    std::vector<double> sv(static_cast<std::size_t>(ell));
    for (int j = 0; j < ell; ++j) sv[static_cast<std::size_t>(j)] = norm2(Rc.col(j), ell);
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    const double threshold = ell * sv[0] * std::numeric_limits<double>::epsilon();
    double min_diag = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ell; ++j) min_diag = std::min(min_diag, qr.R(j, j));
    if (min_diag < threshold) {
        int rank = 0;
        for (double s : sv)
            if (s >= threshold) ++rank;
        throw RankDeficiencyError("range_finder: sketch rank " + std::to_string(rank) +
                                      " below " + std::to_string(ell),
                                  rank);
    }
    return std::move(qr.Q);
}

} // namespace detail

/// Orthonormal basis Q for the range of the sketch Y = (A A^T)^q A Omega.
inline DenseMatrix range_finder(const DenseMatrix& A, const DenseMatrix& Omega, int q,
                                SketchVariant variant = SketchVariant::practical) {
    if (q < 0) throw InvalidArgument("range_finder: q must be >= 0");
    if (Omega.rows() != A.cols()) throw InvalidArgument("range_finder: Omega must be n x ell");
    if (!Omega.all_finite()) throw InvalidArgument("range_finder: non-finite Omega");
    const int ell = Omega.cols();
    if (ell > std::min(A.rows(), A.cols()))
        throw InvalidArgument("range_finder: ell must be <= min(m, n)");

    if (variant == SketchVariant::idealized) {
        DenseMatrix Y = multiply(A, Omega);
        for (int t = 0; t < q; ++t) Y = multiply(A, multiply_At_B(A, Y));
        return detail::orthonormalize_checked(Y);
    }
    DenseMatrix Q = detail::orthonormalize_checked(multiply(A, Omega));
    for (int t = 0; t < q; ++t) {
        DenseMatrix Z = detail::orthonormalize_checked(multiply_At_B(A, Q));
        Q = detail::orthonormalize_checked(multiply(A, Z));
    }
    return Q;
}

/// Randomized subspace iteration: sketch, project, and convert to SVD form.
inline ApproxSvd rand_svd(const DenseMatrix& A, const DenseMatrix& Omega, int q,
                          SketchVariant variant = SketchVariant::practical) {
    DenseMatrix Q = range_finder(A, Omega, q, variant);
    DenseMatrix B = multiply_At_B(Q, A); // ell x n
    SvdFactors fb = svd(B);
    return {multiply(Q, fb.U), std::move(fb.singular_values), std::move(fb.V), std::move(Q)};
}

/// Truncated SVD of Q Q^T A at rank k: B = Q^T A, B_k its best rank-k
/// approximation, U_hat_k = Q U_{B,k}.
inline TruncatedSvd truncate(const DenseMatrix& A, const DenseMatrix& Q, int k) {
    const int ell = Q.cols();
    if (k < 1 || k > ell) throw InvalidArgument("truncate: need 1 <= k <= ell");
    DenseMatrix B = multiply_At_B(Q, A);
    SvdFactors fb = svd(B);
    SvdFactors top = best_rank_k(fb, k);
    return {multiply(Q, top.U), std::move(top.singular_values), std::move(top.V)};
}

} // namespace rsi
