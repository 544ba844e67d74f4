#pragma once

#include <cmath>
#include <vector>

#include "rsi/matrix.hpp"

namespace rsi {

struct QrFactors {
    DenseMatrix Q; ///< rows x cols, orthonormal columns
    DenseMatrix R; ///< cols x cols, upper triangular, nonnegative diagonal
};

namespace detail {

// Householder factorization in place: on return W holds R in its upper
// triangle and the reflector vectors (v_0 = 1 implied) below the diagonal.
inline void householder_qr_inplace(DenseMatrix& W, std::vector<double>& taus) {
    const int m = W.rows(), n = W.cols();
    taus.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double* wj = W.col(j);
        const int len = m - j;
        double normx = norm2(wj + j, len);
        if (normx == 0.0) continue;
        const double alpha = wj[j] >= 0.0 ? -normx : normx;
        // v = x - alpha e1, normalized so v[0] = 1
        const double v0 = wj[j] - alpha;
        for (int i = j + 1; i < m; ++i) wj[i] /= v0;
        taus[static_cast<std::size_t>(j)] = -v0 / alpha;
        wj[j] = alpha;
        // apply H = I - tau v v^T to the trailing columns
        const double tau = taus[static_cast<std::size_t>(j)];
        for (int c = j + 1; c < n; ++c) {
            double* wc = W.col(c);
            double s = wc[j];
            for (int i = j + 1; i < m; ++i) s += wj[i] * wc[i];
            s *= tau;
            wc[j] -= s;
            for (int i = j + 1; i < m; ++i) wc[i] -= s * wj[i];
        }
    }
}

inline DenseMatrix form_thin_q(const DenseMatrix& W, const std::vector<double>& taus) {
    const int m = W.rows(), n = W.cols();
    DenseMatrix Q(m, n);
    for (int j = 0; j < n; ++j) Q(j, j) = 1.0;
    for (int j = n - 1; j >= 0; --j) {
        const double tau = taus[static_cast<std::size_t>(j)];
        if (tau == 0.0) continue;
        const double* vj = W.col(j);
        for (int c = j; c < n; ++c) {
            double* qc = Q.col(c);
            double s = qc[j];
            for (int i = j + 1; i < m; ++i) s += vj[i] * qc[i];
            s *= tau;
            qc[j] -= s;
            for (int i = j + 1; i < m; ++i) qc[i] -= s * vj[i];
        }
    }
    return Q;
}

} // namespace detail

/// Thin QR of A (rows >= cols) by Householder reflections.
/// R's diagonal is made nonnegative by sign flips propagated into Q.
inline QrFactors thin_qr(const DenseMatrix& A) {
    if (A.rows() < A.cols()) throw InvalidArgument("thin_qr: requires rows >= cols");
    if (!A.all_finite()) throw InvalidArgument("thin_qr: non-finite entries");
    const int m = A.rows(), n = A.cols();

    DenseMatrix W = A;
    std::vector<double> taus;
    detail::householder_qr_inplace(W, taus);
    DenseMatrix Q = detail::form_thin_q(W, taus);

    DenseMatrix R(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j && i < m; ++i) R(i, j) = W(i, j);

    for (int j = 0; j < n; ++j) {
        if (R(j, j) < 0.0) {
            for (int c = j; c < n; ++c) R(j, c) = -R(j, c);
            double* qj = Q.col(j);
            for (int i = 0; i < m; ++i) qj[i] = -qj[i];
        }
    }
    return {std::move(Q), std::move(R)};
}

/// R factor only (no Q accumulation); used where just singular values are needed.
inline DenseMatrix qr_r_factor(const DenseMatrix& A) {
    if (A.rows() < A.cols()) throw InvalidArgument("qr_r_factor: requires rows >= cols");
    const int m = A.rows(), n = A.cols();
    DenseMatrix W = A;
    std::vector<double> taus;
    detail::householder_qr_inplace(W, taus);
    DenseMatrix R(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j && i < m; ++i) R(i, j) = W(i, j);
    return R;
}

} // namespace rsi
