#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rsi/matrix.hpp"
#include "rsi/norms.hpp"
#include "rsi/svd.hpp"

namespace rsi {

/// Full SVD of A together with the split index k. All bound evaluators read
/// exact quantities (sigma_j, U_k, V_k, V_perp) from here. Requires
/// rows >= cols so that V spans the whole row space and the Omega partition
/// V^T Omega = [Omega1; Omega2] is complete.
struct ReferenceSvd {
    SvdFactors full;
    int k = 0;
    int m = 0;
    int n = 0;

    double sigma(int j) const { // 1-based, sigma(r+1) == 0
        const int r = static_cast<int>(full.singular_values.size());
        if (j < 1) throw InvalidArgument("ReferenceSvd::sigma: index must be >= 1");
        return j <= r ? full.singular_values[static_cast<std::size_t>(j - 1)] : 0.0;
    }
    double sigma_kp1() const { return sigma(k + 1); }

    DenseMatrix U_k() const { return columns(full.U, 0, k); }
    DenseMatrix V_k() const { return columns(full.V, 0, k); }
    bool has_tail() const { return k < n; }
    DenseMatrix V_perp() const { return columns(full.V, k, n); }

    /// sigma_{k+1}, ..., sigma_r (the diagonal of Sigma_perp).
    std::vector<double> sigma_perp() const {
        return {full.singular_values.begin() + k, full.singular_values.end()};
    }
    /// sigma_{j+1}, ..., sigma_r for any 0 <= j <= r.
    std::vector<double> sigma_tail(int j) const {
        return {full.singular_values.begin() + j, full.singular_values.end()};
    }

    /// gamma_j = sigma_{k+1} / sigma_j (1-based j <= k).
    double gamma(int j) const {
        const double sj = sigma(j);
        if (sj <= 0.0) throw InvalidArgument("ReferenceSvd::gamma: sigma_j = 0");
        return sigma_kp1() / sj;
    }
    double gamma_k() const { return gamma(k); }
};

inline ReferenceSvd make_reference(const DenseMatrix& A, int k) {
    if (A.rows() < A.cols())
        throw InvalidArgument("make_reference: requires rows >= cols (transpose the input)");
    if (k < 1 || k > A.cols()) throw InvalidArgument("make_reference: k out of range");
    return {svd(A, SvdMode::full), k, A.rows(), A.cols()};
}

inline ReferenceSvd make_reference(SvdFactors full, int m, int n, int k) {
    if (m < n) throw InvalidArgument("make_reference: requires rows >= cols");
    if (k < 1 || k > n) throw InvalidArgument("make_reference: k out of range");
    return {std::move(full), k, m, n};
}

/// Partition of V^T Omega and the leverage omega = ||Omega2 pinv(Omega1)||_2,
/// the tangent-like alignment measure between the guess and range(V_k).
struct OmegaSplit {
    DenseMatrix omega1;       ///< k x ell
    DenseMatrix omega2;       ///< (n-k) x ell, empty when k == n
    DenseMatrix omega2_pinv1; ///< Omega2 pinv(Omega1), (n-k) x k
    double leverage = 0.0;
    double sigma_min_omega1 = 0.0;
};

inline OmegaSplit split_omega(const ReferenceSvd& ref, const DenseMatrix& Omega) {
    if (Omega.rows() != ref.n) throw InvalidArgument("split_omega: Omega must be n x ell");
    if (Omega.cols() < ref.k) throw InvalidArgument("split_omega: need ell >= k");
    OmegaSplit out;
    out.omega1 = multiply_At_B(ref.V_k(), Omega);
    const std::vector<double> sv1 = singular_values(out.omega1);
    out.sigma_min_omega1 = sv1.back();
    // The scale is max(||Omega1||, ||Omega||): a guess orthogonal to range(V_k)
    // leaves Omega1 at pure round-off, which a test relative to ||Omega1||
    // alone would miss.
    const double scale = std::max(sv1.front(), frobenius(Omega));
    const double thresh = ref.k * scale * std::numeric_limits<double>::epsilon();
    if (!(out.sigma_min_omega1 > thresh))
        throw AssumptionError("split_omega: rank(Omega1) < k, the starting guess does not "
                              "cover the leading right singular subspace");
    if (!ref.has_tail()) return out;
    out.omega2 = multiply_At_B(ref.V_perp(), Omega);
    out.omega2_pinv1 = multiply(out.omega2, pseudoinverse(out.omega1));
    out.leverage = singular_values(out.omega2_pinv1).front();
    return out;
}

/// Sigma_perp * Omega2 * pinv(Omega1) (row-scaled leverage matrix), the
/// recurring object of the norm-level bounds. Empty split gives an empty
/// value; callers treat its norms as zero.
inline std::optional<DenseMatrix> sigma_perp_leverage(const ReferenceSvd& ref,
                                                      const OmegaSplit& split) {
    if (!ref.has_tail() || split.omega2_pinv1.empty()) return std::nullopt;
    const std::vector<double> sp = ref.sigma_perp();
    return scale_rows(split.omega2_pinv1, sp);
}

/// gamma_1..gamma_k, ascending; gamma_k < 1 iff the gap assumption holds.
inline std::vector<double> singular_ratios(const ReferenceSvd& ref) {
    if (ref.sigma(ref.k) <= 0.0) throw InvalidArgument("singular_ratios: sigma_k = 0");
    std::vector<double> g(static_cast<std::size_t>(ref.k));
    for (int j = 1; j <= ref.k; ++j) g[static_cast<std::size_t>(j - 1)] = ref.gamma(j);
    return g;
}

/// Per-angle structural bounds: sin/tan of theta_j and nu_j in terms of
/// gamma_j^{2q+1} omega (left side) and gamma_j^{2q+2} omega (right side).
struct AngleBounds {
    std::vector<double> sin_theta, sin_nu, tan_theta, tan_nu;
};

inline AngleBounds angle_bounds(std::span<const double> gammas, int q, double leverage) {
    if (q < 0) throw InvalidArgument("angle_bounds: q must be >= 0");
    if (leverage < 0.0) throw InvalidArgument("angle_bounds: leverage must be >= 0");
    AngleBounds b;
    for (double g : gammas) {
        const double x = std::pow(g, 2 * q + 1) * leverage;
        const double y = std::pow(g, 2 * q + 2) * leverage;
        b.tan_theta.push_back(x);
        b.tan_nu.push_back(y);
        b.sin_theta.push_back(x / std::sqrt(1.0 + x * x));
        b.sin_nu.push_back(y / std::sqrt(1.0 + y * y));
    }
    return b;
}

/// Norm-level angle bounds: |||sin angle||| <= gamma_k^{2q(+1)} |||Sigma_perp||| / sigma_k * omega.
struct AngleNormBounds {
    double u_side = 0.0;
    double v_side = 0.0;
};

inline AngleNormBounds angle_norm_bounds(const ReferenceSvd& ref, int q, double leverage,
                                         const NormSpec& spec) {
    const double sk = ref.sigma(ref.k);
    if (sk <= 0.0) throw InvalidArgument("angle_norm_bounds: sigma_k = 0");
    const std::vector<double> sp = ref.sigma_perp();
    const double tail = gauge(sp, spec);
    const double gk = ref.gamma_k();
    return {std::pow(gk, 2 * q) * tail / sk * leverage,
            std::pow(gk, 2 * q + 1) * tail / sk * leverage};
}

/// Verifies max{sin theta'_j, sin nu'_j} <= (sigma_k/sigma_j) max{sin theta'_k, sin nu'_k};
/// returns the slack (bound minus measured) per j. Requires the gap
/// zeta = sigma_k(A) - sigma_{k+1}(A_hat) > 0.
inline std::vector<double> gensintheta_check(const ReferenceSvd& ref,
                                             std::span<const double> sin_theta_prime,
                                             std::span<const double> sin_nu_prime,
                                             double sigma_hat_kp1) {
    const int k = ref.k;
    if (static_cast<int>(sin_theta_prime.size()) != k ||
        static_cast<int>(sin_nu_prime.size()) != k)
        throw InvalidArgument("gensintheta_check: need k angles per side");
    const double zeta = ref.sigma(k) - sigma_hat_kp1;
    if (!(zeta > 0.0))
        throw AssumptionError("gensintheta_check: gap sigma_k(A) - sigma_{k+1}(A_hat) <= 0");
    const double at_k = std::max(sin_theta_prime[static_cast<std::size_t>(k - 1)],
                                 sin_nu_prime[static_cast<std::size_t>(k - 1)]);
    std::vector<double> slack(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
        const double measured = std::max(sin_theta_prime[static_cast<std::size_t>(j - 1)],
                                         sin_nu_prime[static_cast<std::size_t>(j - 1)]);
        slack[static_cast<std::size_t>(j - 1)] = (ref.sigma(k) / ref.sigma(j)) * at_k - measured;
    }
    return slack;
}

/// phi factor for the truncation bounds: 1 for spectral/Frobenius, sqrt(2)
/// for a general unitarily invariant norm.
inline double extraction_phi(const NormSpec& spec) {
    return spec.phi_is_one() ? 1.0 : std::sqrt(2.0);
}

/// Bounds after the rank-k extraction step.
struct ExtractionBounds {
    double norm_bound = 0.0;         ///< max-side bound with the phi factor
    std::vector<double> per_j;       ///< max{sin theta'_j, sin nu'_j} bounds
};

inline ExtractionBounds extraction_bounds(const ReferenceSvd& ref, int q, double leverage,
                                          const NormSpec& spec) {
    const double gk = ref.gamma_k();
    if (!(gk < 1.0))
        throw AssumptionError("extraction_bounds: gamma_k >= 1 (no singular value gap at k)");
    const double sk = ref.sigma(ref.k);
    const std::vector<double> sp = ref.sigma_perp();
    const double tail = gauge(sp, spec);
    const double common = std::pow(gk, 2 * q) / (1.0 - gk);
    ExtractionBounds out;
    out.norm_bound = extraction_phi(spec) * common * tail / sk * leverage;
    for (int j = 1; j <= ref.k; ++j)
        out.per_j.push_back(ref.gamma(j) * common * leverage);
    return out;
}

/// Bounds on individual singular vectors and triplets.
struct SingleVectorBounds {
    std::vector<double> u_subspace;  ///< sin angle(u_j, U_hat) bounds
    std::vector<double> v_subspace;  ///< sin angle(v_j, V_hat) bounds
    std::vector<double> triplet;     ///< max single-vector pair bounds
    std::vector<double> delta_tilde; ///< per-j cluster separation
    double gamma_tilde = 0.0;
};

/// sigma_hat are the approximate singular values (length ell). The cluster
/// separation reads delta_tilde_j = min(min_{sigma_hat_i != sigma_hat_j}
/// |sigma_j - sigma_hat_i|, sigma_j).
inline SingleVectorBounds single_vector_bounds(const ReferenceSvd& ref, int q,
                                               const OmegaSplit& split,
                                               std::span<const double> sigma_hat) {
    SingleVectorBounds out;
    double s2o_norm = 0.0;
    if (auto s2o = sigma_perp_leverage(ref, split))
        s2o_norm = singular_values(*s2o).front();
    out.gamma_tilde = std::sqrt(ref.sigma_kp1() * ref.sigma_kp1() + s2o_norm * s2o_norm);
    for (int j = 1; j <= ref.k; ++j) {
        const double g = ref.gamma(j);
        const double sj = ref.sigma(j);
        out.u_subspace.push_back(std::pow(g, 2 * q + 1) * split.leverage);
        out.v_subspace.push_back(std::pow(g, 2 * q + 2) * split.leverage);
        const double sj_hat =
            j <= static_cast<int>(sigma_hat.size()) ? sigma_hat[static_cast<std::size_t>(j - 1)] : 0.0;
        double dt = sj;
        for (double shi : sigma_hat)
            if (shi != sj_hat) dt = std::min(dt, std::abs(sj - shi));
        out.delta_tilde.push_back(dt);
        if (g == 0.0) {
            out.triplet.push_back(0.0);
            continue;
        }
        if (dt == 0.0)
            throw AssumptionError("single_vector_bounds: degenerate cluster, delta_tilde = 0");
        const double mult = std::sqrt(1.0 + 2.0 * out.gamma_tilde * out.gamma_tilde / (dt * dt));
        out.triplet.push_back(mult * std::pow(g, 2 * q + 1) * split.leverage);
    }
    return out;
}

/// Low-rank approximation error bounds in a unitarily invariant norm.
struct LowRankBounds {
    double nnorm = 0.0;                    ///< |||(I-QQ^T)A||| bound
    double nnorm_rankr = 0.0;              ///< |||(I-QQ^T)A_k||| bound
    std::optional<double> nnorm_rankr2;    ///< |||A - Q B_k||| bound, needs gamma_k < 1
    std::optional<double> two_norm;        ///< squared-sum variant, Schatten p >= 2 only
};

/// Squared-sum variant |||(I-QQ^T)A|||_p^2 <= |||Sigma_perp|||_p^2 +
/// gamma_k^{4q} |||Sigma_perp Omega2 pinv(Omega1)|||_p^2; Q-norms only.
inline double lowrank_two_norm_bound(const ReferenceSvd& ref, int q, const OmegaSplit& split,
                                     const NormSpec& spec) {
    if (!spec.is_qnorm())
        throw InvalidArgument("lowrank_two_norm_bound: requires a Schatten norm with p >= 2");
    const double t1 = gauge(ref.sigma_perp(), spec);
    double t2 = 0.0;
    if (auto s2o = sigma_perp_leverage(ref, split)) t2 = matrix_norm(*s2o, spec);
    const double gk = ref.gamma_k();
    const double g2 = std::pow(gk, 2 * q);
    return std::sqrt(t1 * t1 + g2 * g2 * t2 * t2);
}

inline LowRankBounds lowrank_bounds(const ReferenceSvd& ref, int q, const OmegaSplit& split,
                                    const NormSpec& spec) {
    const std::vector<double> sp = ref.sigma_perp();
    const double t1 = gauge(sp, spec);
    double t2 = 0.0;
    if (auto s2o = sigma_perp_leverage(ref, split)) t2 = matrix_norm(*s2o, spec);
    const double gk = ref.gamma_k();
    const double gpow = std::pow(gk, 2 * q);
    LowRankBounds out;
    out.nnorm = t1 + gpow * t2;
    out.nnorm_rankr = gpow * t2;
    if (gk < 1.0) {
        const double ratio = ref.sigma(1) / ref.sigma(ref.k);
        out.nnorm_rankr2 =
            (1.0 + ratio * extraction_phi(spec) * gpow / (1.0 - gk) * split.leverage) * t1;
    }
    if (spec.is_qnorm()) out.two_norm = lowrank_two_norm_bound(ref, q, split, spec);
    return out;
}

/// Singular value sandwich: sigma_j(A) >= sigma_j(A_hat) >= lower_j.
struct SingularValueBounds {
    std::vector<double> upper; ///< sigma_j(A)
    std::vector<double> lower; ///< sigma_j(A) / sqrt(1 + gamma_j^{4q+2} omega^2)
};

inline SingularValueBounds singular_value_bounds(const ReferenceSvd& ref, int q,
                                                 double leverage) {
    SingularValueBounds out;
    for (int j = 1; j <= ref.k; ++j) {
        const double sj = ref.sigma(j);
        const double g = ref.gamma(j);
        const double x = std::pow(g, 4 * q + 2) * leverage * leverage;
        out.upper.push_back(sj);
        out.lower.push_back(sj / std::sqrt(1.0 + x));
    }
    return out;
}

/// Hoffman-Wielandt-type bounds on |||Sigma - Sigma'||| with Sigma' the
/// zero-padded approximate singular values.
struct HoffmanWielandtBounds {
    double uin = 0.0;
    std::optional<double> schatten; ///< squared-sum variant, Q-norms only
};

inline double hoffman_wielandt_schatten_bound(const ReferenceSvd& ref, int q,
                                              const OmegaSplit& split, const NormSpec& spec) {
    if (!spec.is_qnorm())
        throw InvalidArgument(
            "hoffman_wielandt_schatten_bound: requires a Schatten norm with p >= 2");
    return lowrank_two_norm_bound(ref, q, split, spec);
}

inline HoffmanWielandtBounds hoffman_wielandt_bounds(const ReferenceSvd& ref, int q,
                                                     const OmegaSplit& split,
                                                     const NormSpec& spec) {
    const double t1 = gauge(ref.sigma_perp(), spec);
    double t2 = 0.0;
    if (auto s2o = sigma_perp_leverage(ref, split)) t2 = matrix_norm(*s2o, spec);
    HoffmanWielandtBounds out;
    out.uin = t1 + std::pow(ref.gamma_k(), 2 * q) * t2;
    if (spec.is_qnorm()) out.schatten = hoffman_wielandt_schatten_bound(ref, q, split, spec);
    return out;
}

/// |||Sigma - Sigma'||| for sigma_hat zero-padded to sigma's length.
inline double singular_value_error_norm(std::span<const double> sigma,
                                        std::span<const double> sigma_hat,
                                        const NormSpec& spec) {
    std::vector<double> diff(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double sh = i < sigma_hat.size() ? sigma_hat[i] : 0.0;
        diff[i] = std::abs(sigma[i] - sh);
    }
    std::sort(diff.begin(), diff.end(), std::greater<double>());
    return gauge(diff, spec);
}

/// Gaussian guess constants: C_e bounds E[omega], C_d bounds omega with
/// probability at least 1 - delta.
struct GaussianConstants {
    double c_e = 0.0;
    double c_d = 0.0;
};

inline GaussianConstants gaussian_constants(int n, int k, int rho, double delta) {
    if (rho < 2) throw InvalidArgument("gaussian_constants: rho must be >= 2");
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidArgument("gaussian_constants: delta must be in (0,1)");
    if (k < 1 || n <= k) throw InvalidArgument("gaussian_constants: need 1 <= k < n");
    const double e = std::exp(1.0);
    const double ell = static_cast<double>(k + rho);
    const double c_e = std::sqrt(static_cast<double>(k) / (rho - 1)) +
                       e * std::sqrt(ell * (n - k)) / rho;
    const double c_d = e * std::sqrt(ell) / (rho + 1) * std::pow(2.0 / delta, 1.0 / (rho + 1)) *
                       (std::sqrt(static_cast<double>(n - k)) + std::sqrt(ell) +
                        std::sqrt(2.0 * std::log(2.0 / delta)));
    return {c_e, c_d};
}

/// Expectation (C_e) and 1-delta tail (C_d) substitutions into the per-angle
/// sine bounds.
struct ProbabilisticAngleBounds {
    std::vector<double> exp_theta, exp_nu, tail_theta, tail_nu;
    GaussianConstants constants;
};

inline ProbabilisticAngleBounds probabilistic_angle_bounds(std::span<const double> gammas, int q,
                                                           int n, int k, int rho, double delta) {
    if (gammas.empty() || !(gammas.back() < 1.0))
        throw AssumptionError("probabilistic_angle_bounds: gamma_k >= 1");
    ProbabilisticAngleBounds out;
    out.constants = gaussian_constants(n, k, rho, delta);
    auto sine = [](double x) { return x / std::sqrt(1.0 + x * x); };
    for (double g : gammas) {
        out.exp_theta.push_back(sine(std::pow(g, 2 * q + 1) * out.constants.c_e));
        out.exp_nu.push_back(sine(std::pow(g, 2 * q + 2) * out.constants.c_e));
        out.tail_theta.push_back(sine(std::pow(g, 2 * q + 1) * out.constants.c_d));
        out.tail_nu.push_back(sine(std::pow(g, 2 * q + 2) * out.constants.c_d));
    }
    return out;
}

/// Smallest integer q with q >= (log(epsilon/C_e)/log(gamma_k) - 1) / 2,
/// equivalently gamma_k^{2q+1} C_e <= epsilon.
inline int required_iterations(double epsilon, double c_e, double gamma_k) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw InvalidArgument("required_iterations: epsilon must be in (0,1)");
    if (!(c_e > 0.0)) throw InvalidArgument("required_iterations: C_e must be > 0");
    if (!(gamma_k > 0.0 && gamma_k < 1.0))
        throw InvalidArgument("required_iterations: gamma_k must be in (0,1)");
    auto satisfied = [&](int q) { return std::pow(gamma_k, 2 * q + 1) * c_e <= epsilon; };
    int q = 0;
    if (c_e > epsilon) {
        const double x = 0.5 * (std::log(epsilon / c_e) / std::log(gamma_k) - 1.0);
        q = std::max(0, static_cast<int>(std::ceil(x)));
    }
    while (!satisfied(q)) ++q;
    while (q > 0 && satisfied(q - 1)) --q;
    return q;
}

} // namespace rsi
