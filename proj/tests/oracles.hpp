// Test-only oracles, deliberately independent of the production kernels:
// a two-sided cyclic Jacobi eigensolver for symmetric matrices, a
// projector-difference route to canonical angles, and a normal-equations
// least-squares route to the leverage.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <rsi/matrix.hpp>
#include <rsi/prng.hpp>

namespace oracles {

/// Eigenvalues of a symmetric matrix by two-sided cyclic Jacobi, descending.
inline std::vector<double> symmetric_eigenvalues(rsi::DenseMatrix S) {
    const int n = S.rows();
    if (S.cols() != n) throw rsi::InvalidArgument("symmetric_eigenvalues: square input required");
    const double fro = rsi::frobenius(S);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += S(p, q) * S(p, q);
        if (std::sqrt(off) <= 1e-14 * (fro + 1e-300)) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = S(p, q);
                if (apq == 0.0) continue;
                const double app = S(p, p), aqq = S(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double srp = S(r, p), srq = S(r, q);
                    S(r, p) = S(p, r) = c * srp - s * srq;
                    S(r, q) = S(q, r) = s * srp + c * srq;
                }
                S(p, p) = app - t * apq;
                S(q, q) = aqq + t * apq;
                S(p, q) = S(q, p) = 0.0;
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = S(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
}

/// Singular values of A as square roots of the eigenvalues of A^T A.
inline std::vector<double> singular_values_via_gram(const rsi::DenseMatrix& A) {
    std::vector<double> eig = symmetric_eigenvalues(rsi::multiply_At_B(A, A));
    for (double& v : eig) v = std::sqrt(std::max(0.0, v));
    return eig;
}

/// Canonical angle sines (descending) from the singular values of
/// P_M - P_N: after discarding the dim(M) - dim(N) structural ones, the
/// remaining values pair up and each pair is one sine. Requires the generic
/// position dim(M) + dim(N) <= ambient, otherwise forced intersections
/// collapse eigenvalue pairs and the extraction is ill-defined.
inline std::vector<double> projector_difference_sines(const rsi::DenseMatrix& M,
                                                      const rsi::DenseMatrix& N) {
    if (M.cols() + N.cols() > M.rows())
        throw rsi::InvalidArgument(
            "projector_difference_sines: needs dim(M) + dim(N) <= ambient dim");
    rsi::DenseMatrix D = rsi::subtract(rsi::multiply_A_Bt(M, M), rsi::multiply_A_Bt(N, N));
    std::vector<double> eig = symmetric_eigenvalues(D);
    for (double& v : eig) v = std::abs(v);
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    const int skip = M.cols() - N.cols();
    std::vector<double> sines;
    for (int i = 0; i < N.cols(); ++i)
        sines.push_back(eig.at(static_cast<std::size_t>(skip + 2 * i)));
    return sines;
}

/// Solve the SPD system L L^T x = b by Cholesky; A is overwritten copies.
inline rsi::DenseMatrix solve_spd(rsi::DenseMatrix A, const rsi::DenseMatrix& B) {
    const int n = A.rows();
    for (int j = 0; j < n; ++j) {
        for (int t = 0; t < j; ++t) A(j, j) -= A(j, t) * A(j, t);
        A(j, j) = std::sqrt(A(j, j));
        for (int i = j + 1; i < n; ++i) {
            for (int t = 0; t < j; ++t) A(i, j) -= A(i, t) * A(j, t);
            A(i, j) /= A(j, j);
        }
    }
    rsi::DenseMatrix X = B;
    for (int c = 0; c < B.cols(); ++c) {
        double* x = X.col(c);
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t < i; ++t) x[i] -= A(i, t) * x[t];
            x[i] /= A(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int t = i + 1; t < n; ++t) x[i] -= A(t, i) * x[t];
            x[i] /= A(i, i);
        }
    }
    return X;
}

/// Leverage ||Omega2 pinv(Omega1)||_2 via row-wise least squares
/// (normal equations + Cholesky) and the Jacobi eigensolver.
inline double leverage_via_least_squares(const rsi::DenseMatrix& omega1,
                                         const rsi::DenseMatrix& omega2) {
    // X minimizes ||omega2 - X omega1||_F  =>  X (O1 O1^T) = O2 O1^T
    rsi::DenseMatrix G = rsi::multiply_A_Bt(omega1, omega1);
    rsi::DenseMatrix R = rsi::multiply_A_Bt(omega2, omega1);
    // Solve G X^T = R^T
    rsi::DenseMatrix Xt = solve_spd(G, rsi::transpose(R));
    std::vector<double> eig = symmetric_eigenvalues(rsi::multiply_A_Bt(Xt, Xt));
    return std::sqrt(std::max(0.0, eig.front()));
}

inline rsi::DenseMatrix random_matrix(int m, int n, std::uint64_t seed, bool gaussian = true) {
    rsi::Prng rng(seed);
    rsi::DenseMatrix A(m, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) A(i, j) = gaussian ? rng.normal() : rng.uniform01() - 0.5;
    return A;
}

} // namespace oracles
