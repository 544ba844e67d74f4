#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rsi/angles.hpp"
#include "rsi/bounds.hpp"
#include "rsi/sketch.hpp"

namespace rsi {

enum class Experiment {
    angles_no_extraction,
    angles_extraction,
    singular_values,
    lowrank_errors,
    probabilistic_calibration
};

inline std::string to_string(Experiment e) {
    switch (e) {
    case Experiment::angles_no_extraction: return "angles_no_extraction";
    case Experiment::angles_extraction: return "angles_extraction";
    case Experiment::singular_values: return "singular_values";
    case Experiment::lowrank_errors: return "lowrank_errors";
    case Experiment::probabilistic_calibration: return "probabilistic_calibration";
    }
    return "";
}

inline Experiment experiment_from_string(const std::string& s) {
    if (s == "angles_no_extraction") return Experiment::angles_no_extraction;
    if (s == "angles_extraction") return Experiment::angles_extraction;
    if (s == "singular_values") return Experiment::singular_values;
    if (s == "lowrank_errors") return Experiment::lowrank_errors;
    if (s == "probabilistic_calibration") return Experiment::probabilistic_calibration;
    throw InvalidArgument("unknown experiment '" + s + "'");
}

/// One (measured, bound) pair. The convention throughout is that
/// `bound >= measured` must hold for structural rows; rows whose natural
/// statement is a lower bound are stored with the roles arranged to keep
/// that orientation (e.g. sigma_lower stores the lower bound as `measured`
/// and the approximate singular value as `bound`).
struct BoundEntry {
    std::string quantity;
    int j = 0;             ///< 1-based index; 0 for norm-level rows
    std::string norm_spec; ///< empty for per-index rows
    double measured = 0.0;
    double bound = 0.0;
    bool structural = true; ///< false for probabilistic (Gaussian-constant) rows
    bool exceeds_one = false;
};

/// All evaluated bounds for one (matrix, config) pair.
struct BoundReport {
    std::string matrix_name;
    int k = 0;
    int rho = 0;
    int q = 0;
    std::uint64_t seed = 0;
    std::string variant;
    std::vector<double> gammas;
    double leverage = 0.0;
    double c_e = std::numeric_limits<double>::quiet_NaN();
    double c_d = std::numeric_limits<double>::quiet_NaN();
    double delta = 0.0;
    std::vector<BoundEntry> entries;
    std::vector<std::string> notes; ///< skipped sections with reasons
};

namespace detail {

inline bool sine_like(const std::string& quantity) {
    return quantity.rfind("sin", 0) == 0 || quantity.rfind("extraction", 0) == 0 ||
           quantity == "triplet" || quantity.rfind("prob_", 0) == 0;
}

inline void push(BoundReport& rep, std::string quantity, int j, const NormSpec* spec,
                 double measured, double bound, bool structural = true) {
    BoundEntry e;
    e.quantity = std::move(quantity);
    e.j = j;
    e.norm_spec = spec ? spec->str() : "";
    e.measured = measured;
    e.bound = bound;
    e.structural = structural;
    e.exceeds_one = bound > 1.0 && sine_like(e.quantity);
    rep.entries.push_back(std::move(e));
}

inline double tangent_of_sine(double s) {
    const double c2 = std::max((1.0 - s) * (1.0 + s), 1e-300);
    return s / std::sqrt(c2);
}

} // namespace detail

/// Evaluate every requested bound family for one run and pair each bound
/// with the measured quantity it dominates. `omega` is the starting guess;
/// probabilistic rows are emitted only when `omega_is_gaussian` and rho >= 2.
inline BoundReport evaluate_report(const DenseMatrix& A, const std::string& matrix_name,
                                   const ReferenceSvd& ref, const SketchConfig& cfg,
                                   const DenseMatrix& omega,
                                   const std::set<Experiment>& experiments,
                                   const std::vector<NormSpec>& specs, double delta,
                                   bool omega_is_gaussian = true) {
    BoundReport rep;
    rep.matrix_name = matrix_name;
    rep.k = cfg.k;
    rep.rho = cfg.rho;
    rep.q = cfg.q;
    rep.seed = cfg.seed;
    rep.variant = to_string(cfg.variant);
    rep.delta = delta;

    const int k = cfg.k;
    const int q = cfg.q;
    if (ref.k != k) throw InvalidArgument("evaluate_report: ReferenceSvd split differs from cfg.k");

    const OmegaSplit split = split_omega(ref, omega);
    rep.leverage = split.leverage;
    const ApproxSvd approx = rand_svd(A, omega, q, cfg.variant);
    rep.gammas = singular_ratios(ref);
    const double gamma_k = rep.gammas.back();
    const int ell = omega.cols();

    const DenseMatrix Uk = ref.U_k();
    const DenseMatrix Vk = ref.V_k();

    const bool want_angles = experiments.count(Experiment::angles_no_extraction) ||
                             experiments.count(Experiment::probabilistic_calibration);
    const bool want_extraction = experiments.count(Experiment::angles_extraction);

    AngleSet theta, nu;
    if (want_angles || want_extraction) {
        theta = canonical_angles(approx.U_hat, Uk);
        nu = canonical_angles(approx.V_hat, Vk);
    }

    if (want_angles) {
        const AngleBounds ab = angle_bounds(rep.gammas, q, split.leverage);
        for (int j = 1; j <= k; ++j) {
            const double st = theta.sines[static_cast<std::size_t>(j - 1)];
            const double sn = nu.sines[static_cast<std::size_t>(j - 1)];
            detail::push(rep, "sin_theta", j, nullptr, st, ab.sin_theta[static_cast<std::size_t>(j - 1)]);
            detail::push(rep, "sin_nu", j, nullptr, sn, ab.sin_nu[static_cast<std::size_t>(j - 1)]);
            detail::push(rep, "tan_theta", j, nullptr, detail::tangent_of_sine(st),
                         ab.tan_theta[static_cast<std::size_t>(j - 1)]);
            detail::push(rep, "tan_nu", j, nullptr, detail::tangent_of_sine(sn),
                         ab.tan_nu[static_cast<std::size_t>(j - 1)]);
        }
        for (const NormSpec& spec : specs) {
            const AngleNormBounds nb = angle_norm_bounds(ref, q, split.leverage, spec);
            detail::push(rep, "sin_angle_u_norm", 0, &spec,
                         gauge(theta.sines_descending(), spec), nb.u_side);
            detail::push(rep, "sin_angle_v_norm", 0, &spec, gauge(nu.sines_descending(), spec),
                         nb.v_side);
        }

        // Per-vector angles: column norms of (I - P)U_k give sin angle(u_j, U_hat).
        const SingleVectorBounds svb = single_vector_bounds(ref, q, split, approx.sigma_hat);
        const DenseMatrix pu = detail::project_out(approx.U_hat, Uk);
        const DenseMatrix pv = detail::project_out(approx.V_hat, Vk);
        for (int j = 1; j <= k; ++j) {
            const double su = std::clamp(norm2(pu.col(j - 1), pu.rows()), 0.0, 1.0);
            const double sv = std::clamp(norm2(pv.col(j - 1), pv.rows()), 0.0, 1.0);
            detail::push(rep, "u_vec_subspace", j, nullptr, su,
                         svb.u_subspace[static_cast<std::size_t>(j - 1)]);
            detail::push(rep, "v_vec_subspace", j, nullptr, sv,
                         svb.v_subspace[static_cast<std::size_t>(j - 1)]);
            const double pair =
                std::max(vector_vector_angle(columns(Uk, j - 1, j),
                                             columns(approx.U_hat, j - 1, j)),
                         vector_vector_angle(columns(Vk, j - 1, j),
                                             columns(approx.V_hat, j - 1, j)));
            detail::push(rep, "triplet", j, nullptr, pair,
                         svb.triplet[static_cast<std::size_t>(j - 1)]);
        }

        if (omega_is_gaussian && cfg.rho >= 2 && gamma_k < 1.0) {
            const ProbabilisticAngleBounds pb =
                probabilistic_angle_bounds(rep.gammas, q, ref.n, k, cfg.rho, delta);
            rep.c_e = pb.constants.c_e;
            rep.c_d = pb.constants.c_d;
            for (int j = 1; j <= k; ++j) {
                const double st = theta.sines[static_cast<std::size_t>(j - 1)];
                const double sn = nu.sines[static_cast<std::size_t>(j - 1)];
                detail::push(rep, "prob_exp_sin_theta", j, nullptr, st,
                             pb.exp_theta[static_cast<std::size_t>(j - 1)], false);
                detail::push(rep, "prob_exp_sin_nu", j, nullptr, sn,
                             pb.exp_nu[static_cast<std::size_t>(j - 1)], false);
                detail::push(rep, "prob_tail_sin_theta", j, nullptr, st,
                             pb.tail_theta[static_cast<std::size_t>(j - 1)], false);
                detail::push(rep, "prob_tail_sin_nu", j, nullptr, sn,
                             pb.tail_nu[static_cast<std::size_t>(j - 1)], false);
            }
        } else if (omega_is_gaussian && cfg.rho >= 2) {
            rep.notes.push_back("probabilistic bounds skipped: gamma_k >= 1");
        }
    }

    if (want_extraction) {
        const TruncatedSvd trunc = truncate(A, approx.Q, k);
        const AngleSet theta_p = canonical_angles(trunc.U_k, Uk);
        const AngleSet nu_p = canonical_angles(trunc.V_k, Vk);
        for (int j = 1; j <= k; ++j) {
            detail::push(rep, "trunc_monotone_theta", j, nullptr,
                         theta.sines[static_cast<std::size_t>(j - 1)],
                         theta_p.sines[static_cast<std::size_t>(j - 1)]);
            detail::push(rep, "trunc_monotone_nu", j, nullptr,
                         nu.sines[static_cast<std::size_t>(j - 1)],
                         nu_p.sines[static_cast<std::size_t>(j - 1)]);
        }
        const double sigma_hat_kp1 = ell > k ? approx.sigma_hat[static_cast<std::size_t>(k)] : 0.0;
        try {
            const std::vector<double> slack =
                gensintheta_check(ref, theta_p.sines, nu_p.sines, sigma_hat_kp1);
            for (int j = 1; j <= k; ++j) {
                const double measured = std::max(theta_p.sines[static_cast<std::size_t>(j - 1)],
                                                 nu_p.sines[static_cast<std::size_t>(j - 1)]);
                detail::push(rep, "gensintheta", j, nullptr, measured,
                             measured + slack[static_cast<std::size_t>(j - 1)]);
            }
        } catch (const AssumptionError& e) {
            rep.notes.push_back(std::string("gensintheta skipped: ") + e.what());
        }
        if (gamma_k < 1.0) {
            for (int j = 1; j <= k; ++j) {
                const double measured = std::max(theta_p.sines[static_cast<std::size_t>(j - 1)],
                                                 nu_p.sines[static_cast<std::size_t>(j - 1)]);
                const double g = rep.gammas[static_cast<std::size_t>(j - 1)];
                detail::push(rep, "extraction_angle", j, nullptr, measured,
                             g * std::pow(gamma_k, 2 * q) / (1.0 - gamma_k) * split.leverage);
            }
            for (const NormSpec& spec : specs) {
                const ExtractionBounds eb = extraction_bounds(ref, q, split.leverage, spec);
                const double measured = std::max(gauge(theta_p.sines_descending(), spec),
                                                 gauge(nu_p.sines_descending(), spec));
                detail::push(rep, "extraction_norm", 0, &spec, measured, eb.norm_bound);
            }
        } else {
            rep.notes.push_back("extraction bounds skipped: gamma_k >= 1");
        }
    }

    if (experiments.count(Experiment::singular_values)) {
        const SingularValueBounds sb = singular_value_bounds(ref, q, split.leverage);
        for (int j = 1; j <= k; ++j) {
            const double sj_hat = approx.sigma_hat[static_cast<std::size_t>(j - 1)];
            detail::push(rep, "sigma_upper", j, nullptr, sj_hat,
                         sb.upper[static_cast<std::size_t>(j - 1)]);
            detail::push(rep, "sigma_lower", j, nullptr, sb.lower[static_cast<std::size_t>(j - 1)],
                         sj_hat);
        }
        for (const NormSpec& spec : specs) {
            const double measured =
                singular_value_error_norm(ref.full.singular_values, approx.sigma_hat, spec);
            const HoffmanWielandtBounds hw = hoffman_wielandt_bounds(ref, q, split, spec);
            detail::push(rep, "hw_uin", 0, &spec, measured, hw.uin);
            if (hw.schatten) detail::push(rep, "hw_schatten", 0, &spec, measured, *hw.schatten);
        }
    }

    if (experiments.count(Experiment::lowrank_errors)) {
        const DenseMatrix B = multiply_At_B(approx.Q, A);
        const std::vector<double> sv_full = singular_values(subtract(A, multiply(approx.Q, B)));

        const TruncatedSvd trunc = truncate(A, approx.Q, k);
        const DenseMatrix qbk =
            multiply_A_Bt(scale_columns(trunc.U_k, trunc.sigma_k), trunc.V_k);
        const std::vector<double> sv_trunc = singular_values(subtract(A, qbk));

        // (I-QQ^T)A_k has the same nonzero singular values as
        // (I-QQ^T) U_k Sigma_k, a thin m x k matrix.
        const DenseMatrix uks = scale_columns(Uk, std::span<const double>(
                                                      ref.full.singular_values.data(),
                                                      static_cast<std::size_t>(k)));
        const std::vector<double> sv_rankk =
            singular_values(subtract(uks, multiply(approx.Q, multiply_At_B(approx.Q, uks))));

        const std::vector<double> sv_floor = ref.sigma_tail(ell);
        for (const NormSpec& spec : specs) {
            const LowRankBounds lb = lowrank_bounds(ref, q, split, spec);
            const double m_full = gauge(sv_full, spec);
            detail::push(rep, "lowrank_nnorm", 0, &spec, m_full, lb.nnorm);
            detail::push(rep, "lowrank_nnorm_rankr", 0, &spec, gauge(sv_rankk, spec),
                         lb.nnorm_rankr);
            if (lb.nnorm_rankr2)
                detail::push(rep, "lowrank_nnorm_rankr2", 0, &spec, gauge(sv_trunc, spec),
                             *lb.nnorm_rankr2);
            if (lb.two_norm)
                detail::push(rep, "lowrank_2norm", 0, &spec, m_full, *lb.two_norm);
            if (spec.kind != NormSpec::Kind::kyfan)
                detail::push(rep, "eckart_floor", 0, &spec, gauge(sv_floor, spec), m_full);
        }
        if (gamma_k >= 1.0)
            rep.notes.push_back("lowrank rank-k extraction bound skipped: gamma_k >= 1");
    }

    return rep;
}

} // namespace rsi
