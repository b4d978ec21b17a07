#pragma once

#include <stdexcept>
#include <string>

namespace qka {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or ambient dimensions of the operands do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied value violates a documented precondition
/// (non-unit quaternion, vector outside the subspace, angle out of range, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The requested construction does not exist for the given parameters
/// (violated inequality, ambient space too small, wrong dimension class).
class Inadmissible : public Error {
public:
    using Error::Error;
};

/// A numerical invariant that should hold up to round-off did not.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace qka
