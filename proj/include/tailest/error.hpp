#pragma once

#include <stdexcept>

namespace tailest {

// Root of the toolkit's exception hierarchy so callers can catch broadly.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition violation: bad k, parameters outside their domain, empty input.
struct DomainError : Error {
    using Error::Error;
};

// A guarded denominator fell below the hard floor (1e-12); the result would be
// numerically meaningless.  Some callers have a documented fallback instead.
struct SingularError : Error {
    using Error::Error;
};

// Malformed or unusable input data (CSV parsing, missing column, no usable rows).
struct DataError : Error {
    using Error::Error;
};

// Filesystem-level failure (missing file, unwritable output path).
struct IoError : Error {
    using Error::Error;
};

} // namespace tailest
