#ifndef PSIM_ERRORS_HPP
#define PSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace psim {

// Error categories. Numeric values double as process exit codes, so keep
// them stable: 0 is success, 1 is reserved for command-line usage errors.
enum class ErrorCode : int {
    validation = 2,   // malformed scenario, broken invariant, bad argument
    capacity = 3,     // Hilbert-space dimension above the configured cap
    resolution = 4,   // theta quadrature too coarse for the phase oscillation
    sweep_failed = 5, // every grid point of a sweep failed
    degeneracy = 6,   // equal branch actions, no stationary-phase selection
    unsupported = 7,  // operation outside the supported model family
    io = 8,           // file system failure
    internal = 9,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

[[noreturn]] inline void raise_validation(const std::string& message) {
    throw Error(ErrorCode::validation, message);
}

} // namespace psim

#endif
