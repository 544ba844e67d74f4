#pragma once

#include <stdexcept>
#include <string>

namespace rsi {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violation (bad shapes, out-of-range parameters, non-finite data).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative kernel failed to converge within its sweep limit.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A sketch or starting guess lost rank; carries the numerical rank observed.
class RankDeficiencyError : public Error {
public:
    RankDeficiencyError(const std::string& what, int numerical_rank)
        : Error(what), numerical_rank_(numerical_rank) {}
    int numerical_rank() const noexcept { return numerical_rank_; }

private:
    int numerical_rank_;
};

/// A hypothesis of the analysis does not hold for the given inputs
/// (rank(Omega1) < k, gamma_k >= 1, zeta <= 0, degenerate cluster).
class AssumptionError : public Error {
public:
    using Error::Error;
};

} // namespace rsi
