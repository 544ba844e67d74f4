#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "rsi/matrix.hpp"
#include "rsi/qr.hpp"

namespace rsi {

/// SVD triplet A = U diag(sigma) V^T with sigma descending and
/// orthonormal U (m x r), V (n x r), r = min(m, n).
struct SvdFactors {
    DenseMatrix U;
    std::vector<double> singular_values;
    DenseMatrix V;
};

/// Both modes return all r = min(m,n) triplets; the distinction is kept
/// for callers that want to state intent.
enum class SvdMode { full, thin };

namespace detail {

inline constexpr double kJacobiTol = 2e-14;
inline constexpr int kJacobiMaxSweeps = 60;

// One-sided Jacobi orthogonalization of the columns of W.
// Rotation angle solves t^2 + 2*zeta*t - 1 = 0 with zeta = (beta-alpha)/(2*gamma),
// which annihilates the (p,q) column dot product; the rotated squared norms are
// alpha - t*gamma and beta + t*gamma. V, when non-null, accumulates rotations.
inline void jacobi_orthogonalize(DenseMatrix& W, DenseMatrix* V) {
    const int n = W.cols();
    const int len = W.rows();
    std::vector<double> sq(static_cast<std::size_t>(n));
    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        for (int j = 0; j < n; ++j)
            sq[static_cast<std::size_t>(j)] = dot(W.col(j), W.col(j), len);
        int rotations = 0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double* wp = W.col(p);
                double* wq = W.col(q);
                const double gamma = dot(wp, wq, len);
                const double alpha = sq[static_cast<std::size_t>(p)];
                const double beta = sq[static_cast<std::size_t>(q)];
                if (gamma == 0.0 || gamma * gamma <= kJacobiTol * kJacobiTol * alpha * beta)
                    continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int i = 0; i < len; ++i) {
                    const double a = wp[i], b = wq[i];
                    wp[i] = c * a - s * b;
                    wq[i] = s * a + c * b;
                }
                sq[static_cast<std::size_t>(p)] = alpha - t * gamma;
                sq[static_cast<std::size_t>(q)] = beta + t * gamma;
                if (V) {
                    double* vp = V->col(p);
                    double* vq = V->col(q);
                    for (int i = 0; i < V->rows(); ++i) {
                        const double a = vp[i], b = vq[i];
                        vp[i] = c * a - s * b;
                        vq[i] = s * a + c * b;
                    }
                }
                ++rotations;
            }
        }
        if (rotations == 0) return;
    }
    throw ConvergenceError("svd: Jacobi sweeps did not converge");
}

// Fill exactly-zero columns of U (sigma_j == 0, sorted last) with a
// deterministic orthonormal completion drawn from identity columns.
inline void complete_zero_columns(DenseMatrix& U, const std::vector<double>& sigma) {
    const int m = U.rows(), n = U.cols();
    for (int j = 0; j < n; ++j) {
        if (sigma[static_cast<std::size_t>(j)] != 0.0) continue;
        bool done = false;
        for (int cand = 0; cand < m && !done; ++cand) {
            std::vector<double> v(static_cast<std::size_t>(m), 0.0);
            v[static_cast<std::size_t>(cand)] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (int c = 0; c < j; ++c) {
                    const double* uc = U.col(c);
                    const double s = dot(uc, v.data(), m);
                    for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] -= s * uc[i];
                }
            }
            const double nv = norm2(v.data(), m);
            if (nv > 0.5) {
                double* uj = U.col(j);
                for (int i = 0; i < m; ++i) uj[i] = v[static_cast<std::size_t>(i)] / nv;
                done = true;
            }
        }
        if (!done) throw ConvergenceError("svd: failed to complete orthonormal basis");
    }
}

// SVD of a tall or square matrix (m >= n) without the sign convention.
inline SvdFactors svd_tall(const DenseMatrix& A) {
    const int n = A.cols();
    QrFactors qr = thin_qr(A);
    DenseMatrix W = qr.R;
    DenseMatrix V = DenseMatrix::identity(n);
    jacobi_orthogonalize(W, &V);

    std::vector<double> sigma(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) sigma[static_cast<std::size_t>(j)] = norm2(W.col(j), n);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return sigma[static_cast<std::size_t>(a)] > sigma[static_cast<std::size_t>(b)];
    });

    DenseMatrix Ur(n, n), Vs(n, n);
    std::vector<double> ss(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const int src = order[static_cast<std::size_t>(j)];
        const double s = sigma[static_cast<std::size_t>(src)];
        ss[static_cast<std::size_t>(j)] = s;
        std::copy(V.col(src), V.col(src) + n, Vs.col(j));
        if (s > 0.0) {
            const double* w = W.col(src);
            double* u = Ur.col(j);
            for (int i = 0; i < n; ++i) u[i] = w[i] / s;
        }
    }
    complete_zero_columns(Ur, ss);
    return {multiply(qr.Q, Ur), std::move(ss), std::move(Vs)};
}

// Force the largest-magnitude entry of each U column nonnegative,
// propagating the flip to the matching V column.
inline void apply_sign_convention(DenseMatrix& U, DenseMatrix& V) {
    for (int j = 0; j < U.cols(); ++j) {
        const double* uj = U.col(j);
        int arg = 0;
        double best = 0.0;
        for (int i = 0; i < U.rows(); ++i) {
            const double a = std::abs(uj[i]);
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (uj[arg] < 0.0) {
            double* u = U.col(j);
            for (int i = 0; i < U.rows(); ++i) u[i] = -u[i];
            double* v = V.col(j);
            for (int i = 0; i < V.rows(); ++i) v[i] = -v[i];
        }
    }
}

} // namespace detail

/// Singular value decomposition via thin QR + one-sided Jacobi.
inline SvdFactors svd(const DenseMatrix& A, SvdMode mode = SvdMode::thin) {
    (void)mode;
    if (!A.all_finite()) throw InvalidArgument("svd: non-finite entries");
    SvdFactors f;
    if (A.rows() >= A.cols()) {
        f = detail::svd_tall(A);
    } else {
        SvdFactors ft = detail::svd_tall(transpose(A));
        f = {std::move(ft.V), std::move(ft.singular_values), std::move(ft.U)};
    }
    detail::apply_sign_convention(f.U, f.V);
    return f;
}

/// Singular values only (descending); skips all U/V bookkeeping.
inline std::vector<double> singular_values(const DenseMatrix& A) {
    if (!A.all_finite()) throw InvalidArgument("singular_values: non-finite entries");
    DenseMatrix R = (A.rows() >= A.cols()) ? qr_r_factor(A) : qr_r_factor(transpose(A));
    detail::jacobi_orthogonalize(R, nullptr);
    std::vector<double> sigma(static_cast<std::size_t>(R.cols()));
    for (int j = 0; j < R.cols(); ++j)
        sigma[static_cast<std::size_t>(j)] = norm2(R.col(j), R.rows());
    std::sort(sigma.begin(), sigma.end(), std::greater<double>());
    return sigma;
}

/// Moore-Penrose inverse via SVD with relative rank threshold.
/// Singular values below rank_tol * sigma_1 are zeroed; rank_tol < 0 selects
/// the default max(m,n) * machine epsilon.
inline DenseMatrix pseudoinverse(const DenseMatrix& A, double rank_tol = -1.0) {
    if (rank_tol < 0.0)
        rank_tol = std::max(A.rows(), A.cols()) * std::numeric_limits<double>::epsilon();
    SvdFactors f = svd(A);
    const double cutoff = rank_tol * (f.singular_values.empty() ? 0.0 : f.singular_values[0]);
    std::vector<double> w(f.singular_values.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double s = f.singular_values[j];
        w[j] = (s <= cutoff || s == 0.0) ? 0.0 : 1.0 / s;
    }
    return multiply_A_Bt(scale_columns(f.V, w), f.U);
}

/// Leading-k slice of an SVD: the Eckart-Young best rank-k approximation.
inline SvdFactors best_rank_k(const SvdFactors& f, int k) {
    const int r = static_cast<int>(f.singular_values.size());
    if (k < 1 || k > r) throw InvalidArgument("best_rank_k: k out of range");
    return {columns(f.U, 0, k),
            std::vector<double>(f.singular_values.begin(), f.singular_values.begin() + k),
            columns(f.V, 0, k)};
}

/// U diag(sigma) V^T.
inline DenseMatrix reconstruct(const SvdFactors& f) {
    return multiply_A_Bt(scale_columns(f.U, f.singular_values), f.V);
}

} // namespace rsi
