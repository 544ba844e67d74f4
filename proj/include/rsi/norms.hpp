#pragma once

#include <cmath>
#include <span>
#include <string>

#include "rsi/matrix.hpp"
#include "rsi/svd.hpp"

namespace rsi {

/// Selector for a unitarily invariant norm, evaluated through its
/// symmetric gauge function on a descending singular value vector.
/// Schatten-infinity is the explicit `spectral` variant rather than a
/// large floating-point p.
struct NormSpec {
    enum class Kind { spectral, schatten, kyfan };

    Kind kind = Kind::spectral;
    double p = 0.0; ///< schatten exponent, finite, >= 1
    int k = 0;      ///< kyfan order, >= 1

    static NormSpec spectral() { return {Kind::spectral, 0.0, 0}; }
    static NormSpec frobenius() { return {Kind::schatten, 2.0, 0}; }
    static NormSpec schatten(double p) {
        if (!(p >= 1.0) || std::isinf(p))
            throw InvalidArgument("NormSpec: schatten p must be finite and >= 1 (use spectral for p=inf)");
        return {Kind::schatten, p, 0};
    }
    static NormSpec kyfan(int k) {
        if (k < 1) throw InvalidArgument("NormSpec: kyfan k must be >= 1");
        return {Kind::kyfan, 0.0, k};
    }

    /// "spectral" | "frobenius" | "schatten:<p>" | "kyfan:<k>"
    static NormSpec parse(const std::string& s) {
        if (s == "spectral") return spectral();
        if (s == "frobenius") return frobenius();
        if (s.rfind("schatten:", 0) == 0) {
            const std::string arg = s.substr(9);
            if (arg == "inf") return spectral();
            return schatten(std::stod(arg));
        }
        if (s.rfind("kyfan:", 0) == 0) return kyfan(std::stoi(s.substr(6)));
        throw InvalidArgument("NormSpec: unrecognized spec '" + s + "'");
    }

    std::string str() const {
        switch (kind) {
        case Kind::spectral: return "spectral";
        case Kind::schatten: {
            if (p == 2.0) return "frobenius";
            char buf[32];
            std::snprintf(buf, sizeof(buf), "schatten:%g", p);
            return buf;
        }
        case Kind::kyfan: return "kyfan:" + std::to_string(k);
        }
        return "";
    }

    /// True when this spec denotes the spectral or Frobenius norm
    /// (the phi = 1 cases of the extraction bounds).
    bool phi_is_one() const {
        return kind == Kind::spectral || (kind == Kind::schatten && p == 2.0) ||
               (kind == Kind::kyfan && k == 1);
    }

    /// Schatten-p with p >= 2 (including spectral): the norms admitting the
    /// squared-sum variants of the low-rank and Hoffman-Wielandt bounds.
    bool is_qnorm() const {
        return kind == Kind::spectral || (kind == Kind::schatten && p >= 2.0);
    }

    bool operator==(const NormSpec&) const = default;
};

/// Symmetric gauge of a descending nonnegative vector.
/// Empty input yields 0 for spectral/schatten (the norm of an empty
/// diagonal block); Ky-Fan requires k <= length.
inline double gauge(std::span<const double> sv, const NormSpec& spec) {
    for (std::size_t i = 0; i < sv.size(); ++i) {
        if (sv[i] < 0.0) throw InvalidArgument("gauge: negative singular value");
        if (i > 0 && sv[i] > sv[i - 1] + 1e-9 * (sv[0] + 1.0))
            throw InvalidArgument("gauge: singular values not descending");
    }
    switch (spec.kind) {
    case NormSpec::Kind::spectral:
        return sv.empty() ? 0.0 : sv[0];
    case NormSpec::Kind::schatten: {
        if (spec.p < 1.0) throw InvalidArgument("gauge: schatten p < 1");
        if (sv.empty()) return 0.0;
        // compensated summation; long spectra with p near 1 need the headroom
        double sum = 0.0, comp = 0.0;
        for (double s : sv) {
            const double term = (spec.p == 2.0) ? s * s : std::pow(s, spec.p);
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return (spec.p == 2.0) ? std::sqrt(sum) : std::pow(sum, 1.0 / spec.p);
    }
    case NormSpec::Kind::kyfan: {
        if (spec.k < 1 || spec.k > static_cast<int>(sv.size()))
            throw InvalidArgument("gauge: kyfan k out of range");
        double sum = 0.0, comp = 0.0;
        for (int i = 0; i < spec.k; ++i) {
            const double y = sv[static_cast<std::size_t>(i)] - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    }
    }
    throw InvalidArgument("gauge: bad spec");
}

/// |||A||| = gauge of A's singular values.
inline double matrix_norm(const DenseMatrix& A, const NormSpec& spec) {
    const std::vector<double> sv = singular_values(A);
    return gauge(sv, spec);
}

} // namespace rsi
