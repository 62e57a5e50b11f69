#pragma once

#include <stdexcept>
#include <string>

namespace pmnet {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not line up (matmul, layer wiring, label widths).
struct ShapeError : Error {
    using Error::Error;
};

/// A caller-supplied value violates a precondition (empty input, bad range).
struct ArgumentError : Error {
    using Error::Error;
};

/// A computation produced or received a non-finite value.
struct NumericError : Error {
    using Error::Error;
};

/// An operation was invoked on an object in the wrong mode or phase.
struct StateError : Error {
    using Error::Error;
};

/// A text input (feature table, config, merge map) failed to parse.
struct ParseError : Error {
    using Error::Error;
};

/// File could not be read/written, or a binary stream is malformed.
struct IoError : Error {
    using Error::Error;
};

}  // namespace pmnet
