#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sticky {

/// Raised when a mesh violates a structural or weight invariant.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the eigensolvers. Carries the best residuals reached so far.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> residuals = {})
        : std::runtime_error(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Raised when exhaustive subset enumeration is requested on a mesh that is too large.
class EnumerationLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a special-function or shooting evaluation is asked for an argument
/// outside the range where its accuracy is controlled.
class EvaluationRangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sticky
