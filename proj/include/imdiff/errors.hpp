#pragma once

#include <stdexcept>
#include <string>

namespace imdiff {

// Dimension mismatch or empty operand where a nonempty one is required.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad scalar parameter (nonpositive step size, offset out of range, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation produced NaN/Inf.  `iteration` is the step index when the
// failure happened inside an iterative driver, -1 otherwise.
struct NonFiniteError : std::runtime_error {
    long long iteration;
    explicit NonFiniteError(const std::string& what, long long k = -1)
        : std::runtime_error(what), iteration(k) {}
};

// Linear system is singular or too ill-conditioned to trust.
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A problem construction violates strong convexity (e.g. rank-deficient
// design matrix in least squares).
struct StrongConvexityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A contraction/convergence premise needed by an operation does not hold.
struct PremiseViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Not enough usable data for a statistical fit.
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace imdiff
