#pragma once

#include <stdexcept>
#include <string>

namespace fng {

// CLI exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitNumericalError = 3,
    kExitInconclusive = 4,
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ring solver found no root in the scanned bracket.
struct NoSolutionError : NumericalError {
    using NumericalError::NumericalError;
};

// Finite-difference stencil points landed on different solution branches.
struct BranchJumpError : NumericalError {
    using NumericalError::NumericalError;
};

struct MaxIterationsError : NumericalError {
    using NumericalError::NumericalError;
};

// Trajectory window does not cover the requested period.
struct PeriodMismatchError : NumericalError {
    using NumericalError::NumericalError;
};

// Power-law fit input spans less than one decade.
struct InsufficientRangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quench classification fell in the guard band between GS and CES.
struct InconclusiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowTooShortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fng
