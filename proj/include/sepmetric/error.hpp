#pragma once

#include <stdexcept>
#include <string>

namespace sepmetric {

/// Base for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid input: bad files, bad configuration, violated preconditions.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// A class does not have enough samples for the requested operation.
class InsufficientClassDataError : public ValidationError {
public:
    explicit InsufficientClassDataError(const std::string& what) : ValidationError(what) {}
};

/// Numerical failure: divergence, non-convergence, degenerate decompositions.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

} // namespace sepmetric
