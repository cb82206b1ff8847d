#pragma once

#include <stdexcept>
#include <string>

namespace uscr {

// Two top-level error categories, mirrored by the CLI exit codes:
// DataError -> 2 (malformed or incompatible input), NumericError -> 3
// (a computation that could not be completed).  Per-column failures inside a
// screen are captured as result entries instead of being thrown.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : Error {
    using Error::Error;
};

// CSV cell that does not parse, missing value, ragged row.
struct ParseError : DataError {
    using DataError::DataError;
};

// Structurally sound input that violates a contract (size, kind, config).
struct ValidationError : DataError {
    using DataError::DataError;
};

struct NumericError : Error {
    using Error::Error;
};

// Argument outside a function's mathematical domain.
struct DomainError : NumericError {
    using NumericError::NumericError;
};

// Iterative solver failed to reach its tolerances.
struct ConvergenceError : NumericError {
    using NumericError::NumericError;
};

// Input degenerate for the requested computation (zero variance, empty group).
struct DegenerateError : NumericError {
    using NumericError::NumericError;
};

// Binary response perfectly separated by a predictor; the MLE diverges.
struct SeparationError : NumericError {
    using NumericError::NumericError;
};

} // namespace uscr
