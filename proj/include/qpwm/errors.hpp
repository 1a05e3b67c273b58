#pragma once

#include <stdexcept>
#include <string>

namespace qpwm {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mixing fixed-point values of different formats.
struct FormatError : Error {
    using Error::Error;
};

/// Index or position outside the defined range.
struct RangeError : Error {
    using Error::Error;
};

/// Input whose value makes the operation undefined (e.g. constant matrix set).
struct DegenerateInputError : Error {
    using Error::Error;
};

/// Exclusion-table slot overflow: more than kappa matches at one position.
struct CapacityError : Error {
    using Error::Error;
};

/// Configured resource cap exceeded (sparse-state size, distribution support).
struct ResourceError : Error {
    using Error::Error;
};

/// Malformed input file or config value.
struct ParseError : Error {
    using Error::Error;
};

/// Violated operation precondition.
struct PreconditionError : Error {
    using Error::Error;
};

} // namespace qpwm
