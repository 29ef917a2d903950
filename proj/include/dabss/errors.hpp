#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dabss {

/// Root of every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (non-square, mismatched rows/cols, wrong state length).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// NaN or infinite entries where finite values are required.
class NumericInputError : public Error {
public:
    using Error::Error;
};

/// Index range outside the schedule, or an empty/inverted product range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Converter or simulation parameters violate their invariants.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A fixed-point system (I - M) or (D' - M) is singular or numerically close to it.
class MarginalSystemError : public Error {
public:
    MarginalSystemError(const std::string& what, std::vector<std::complex<double>> eigenvalues,
                        double condition_estimate)
        : Error(what), eigenvalues_(std::move(eigenvalues)), condition_(condition_estimate) {}

    /// Eigenvalues of the transition matrix whose fixed point was requested.
    [[nodiscard]] const std::vector<std::complex<double>>& eigenvalues() const noexcept { return eigenvalues_; }
    [[nodiscard]] double condition_estimate() const noexcept { return condition_; }

private:
    std::vector<std::complex<double>> eigenvalues_;
    double condition_;
};

/// z lies on (or within tolerance of) an eigenvalue of the half-cycle transition matrix.
class ResolventSingularityError : public Error {
public:
    using Error::Error;
};

/// The similarity transform used for surface equivalence is singular.
class SimilarityTransformError : public Error {
public:
    using Error::Error;
};

/// Two algebraically equal evaluation paths disagreed beyond tolerance.
class IdentityError : public Error {
public:
    using Error::Error;
};

/// Time-domain iteration did not settle within its period budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}

    [[nodiscard]] double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Injected perturbation drove a subinterval duration negative.
class AmplitudeError : public Error {
public:
    using Error::Error;
};

/// Malformed, unreadable or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace dabss
