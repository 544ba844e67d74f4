#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rsi/matrix.hpp"
#include "rsi/prng.hpp"
#include "rsi/qr.hpp"

namespace rsi {

enum class MatrixFamily { controlled_gap, low_rank_plus_noise, low_rank_plus_decay };

inline std::string to_string(MatrixFamily f) {
    switch (f) {
    case MatrixFamily::controlled_gap: return "controlled_gap";
    case MatrixFamily::low_rank_plus_noise: return "low_rank_plus_noise";
    case MatrixFamily::low_rank_plus_decay: return "low_rank_plus_decay";
    }
    return "";
}

inline MatrixFamily matrix_family_from_string(const std::string& s) {
    if (s == "controlled_gap") return MatrixFamily::controlled_gap;
    if (s == "low_rank_plus_noise") return MatrixFamily::low_rank_plus_noise;
    if (s == "low_rank_plus_decay") return MatrixFamily::low_rank_plus_decay;
    throw InvalidArgument("unknown matrix family '" + s + "'");
}

/// Reproducible test-matrix recipe. `param` is the family knob:
/// gap for controlled_gap, gamma_n for low_rank_plus_noise, d for
/// low_rank_plus_decay. `n` applies to the square families (controlled_gap
/// is fixed at 3000 x 300).
struct TestMatrixSpec {
    MatrixFamily family = MatrixFamily::controlled_gap;
    double param = 1.0;
    int n = 300;
    int r = 15;
    std::uint64_t seed = 0;
    std::string name;

    void validate() const {
        if (r < 1) throw InvalidArgument("TestMatrixSpec: r must be >= 1");
        if (param <= 0.0) throw InvalidArgument("TestMatrixSpec: family parameter must be > 0");
        if (family != MatrixFamily::controlled_gap && r > n)
            throw InvalidArgument("TestMatrixSpec: r must be <= n");
    }
};

namespace detail {

// sprand-style sparse column: ceil(density*n) positions drawn uniformly
// without replacement, values i.i.d. uniform(0,1).
inline void sparse_uniform_column(Prng& rng, int n, double density, std::vector<int>& positions,
                                  std::vector<double>& values) {
    const int nnz = static_cast<int>(std::ceil(density * n));
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int t = 0; t < nnz; ++t) {
        const int pick = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - t)));
        std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick)]);
    }
    positions.assign(idx.begin(), idx.begin() + nnz);
    std::sort(positions.begin(), positions.end());
    values.resize(static_cast<std::size_t>(nnz));
    for (double& v : values) v = rng.uniform01();
}

} // namespace detail

/// 3000 x 300 sum of sparse nonnegative rank-1 terms with coefficients
/// gap/j for j <= r and 1/j beyond; the spectrum decays like 1/j with a
/// jump between indices r and r+1 controlled by `gap`.
inline DenseMatrix controlled_gap(double gap, std::uint64_t seed, int r = 15) {
    if (gap <= 0.0) throw InvalidArgument("controlled_gap: gap must be > 0");
    const int m = 3000, n = 300;
    const double density = 0.025;
    Prng rng(seed);
    DenseMatrix A(m, n);
    std::vector<int> xi, yi;
    std::vector<double> xv, yv;
    for (int j = 1; j <= n; ++j) {
        detail::sparse_uniform_column(rng, m, density, xi, xv);
        detail::sparse_uniform_column(rng, n, density, yi, yv);
        const double c = (j <= r ? gap : 1.0) / j;
        for (std::size_t b = 0; b < yi.size(); ++b) {
            double* col = A.col(yi[b]);
            const double cy = c * yv[b];
            for (std::size_t a = 0; a < xi.size(); ++a) col[xi[a]] += cy * xv[a];
        }
    }
    return A;
}

/// n x n rank-r identity block plus a scaled symmetric Gaussian perturbation
/// sqrt(gamma_n r / (2 n^2)) (G + G^T).
inline DenseMatrix low_rank_plus_noise(int n, int r, double gamma_n, std::uint64_t seed) {
    if (gamma_n <= 0.0) throw InvalidArgument("low_rank_plus_noise: gamma_n must be > 0");
    if (r < 1 || r > n) throw InvalidArgument("low_rank_plus_noise: need 1 <= r <= n");
    Prng rng(seed);
    DenseMatrix G(n, n);
    for (int j = 0; j < n; ++j) {
        double* gj = G.col(j);
        for (int i = 0; i < n; ++i) gj[i] = rng.normal();
    }
    const double scale = std::sqrt(gamma_n * r / (2.0 * n * n));
    DenseMatrix A(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) A(i, j) = scale * (G(i, j) + G(j, i));
    for (int i = 0; i < r; ++i) A(i, i) += 1.0;
    return A;
}

/// n x n matrix with prescribed spectrum (1 repeated r times, then j^{-d} for
/// j = 2..n-r+1) and Haar-like factors from QR of Gaussian draws.
inline DenseMatrix low_rank_plus_decay(int n, int r, double d, std::uint64_t seed) {
    if (d <= 0.0) throw InvalidArgument("low_rank_plus_decay: d must be > 0");
    if (r < 1 || r > n) throw InvalidArgument("low_rank_plus_decay: need 1 <= r <= n");
    Prng rng(seed);
    auto haar = [&]() {
        DenseMatrix G(n, n);
        for (int j = 0; j < n; ++j) {
            double* gj = G.col(j);
            for (int i = 0; i < n; ++i) gj[i] = rng.normal();
        }
        return thin_qr(G).Q;
    };
    DenseMatrix U = haar();
    DenseMatrix V = haar();
    std::vector<double> diag(static_cast<std::size_t>(n));
    for (int i = 0; i < r; ++i) diag[static_cast<std::size_t>(i)] = 1.0;
    for (int i = r; i < n; ++i)
        diag[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i - r + 2), -d);
    return multiply_A_Bt(scale_columns(U, diag), V);
}

inline DenseMatrix generate(const TestMatrixSpec& spec) {
    spec.validate();
    switch (spec.family) {
    case MatrixFamily::controlled_gap: return controlled_gap(spec.param, spec.seed, spec.r);
    case MatrixFamily::low_rank_plus_noise:
        return low_rank_plus_noise(spec.n, spec.r, spec.param, spec.seed);
    case MatrixFamily::low_rank_plus_decay:
        return low_rank_plus_decay(spec.n, spec.r, spec.param, spec.seed);
    }
    throw InvalidArgument("generate: bad family");
}

/// The nine named matrices used throughout the experiments.
inline std::vector<TestMatrixSpec> standard_test_matrices(std::uint64_t base_seed = 2024) {
    std::vector<TestMatrixSpec> out;
    const double gaps[] = {1.0, 2.0, 10.0};
    const char* gap_names[] = {"GapSmall", "GapMedium", "GapLarge"};
    const double noises[] = {1e-2, 1e-1, 1.0};
    const char* noise_names[] = {"NoiseSmall", "NoiseMedium", "NoiseLarge"};
    const double decays[] = {0.5, 1.0, 2.0};
    const char* decay_names[] = {"DecaySlow", "DecayMedium", "DecayFast"};
    for (int i = 0; i < 3; ++i)
        out.push_back({MatrixFamily::controlled_gap, gaps[i], 300, 15, base_seed + static_cast<std::uint64_t>(i), gap_names[i]});
    for (int i = 0; i < 3; ++i)
        out.push_back({MatrixFamily::low_rank_plus_noise, noises[i], 300, 15, base_seed + static_cast<std::uint64_t>(3 + i), noise_names[i]});
    for (int i = 0; i < 3; ++i)
        out.push_back({MatrixFamily::low_rank_plus_decay, decays[i], 300, 15, base_seed + static_cast<std::uint64_t>(6 + i), decay_names[i]});
    return out;
}

} // namespace rsi
