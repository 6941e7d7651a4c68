#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfdlab {

/// Invalid inputs: bad config values, mismatched lattices, inadmissible
/// scheme parameters. CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite state detected during time stepping. Carries the step index
/// at which the first NaN/Inf appeared. CLI maps this to exit code 3.
class SolverAbort : public std::runtime_error {
public:
    SolverAbort(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    /// Wraps an abort whose message already carries its context verbatim.
    struct Raw {};
    SolverAbort(Raw, const std::string& what, std::size_t step)
        : std::runtime_error(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace sfdlab
