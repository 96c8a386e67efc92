#pragma once

#include <stdexcept>
#include <string>

namespace ricci {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is a 0-based character offset.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)),
          message_(message), position_(position) {}

    const std::string& reason() const noexcept { return message_; }
    std::size_t position() const noexcept { return position_; }

private:
    std::string message_;
    std::size_t position_;
};

/// Evaluation outside a function's domain (log of a non-positive number, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A caller violated a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An iterative or integration routine failed to deliver (projection did
/// not converge, step size underflow, monotonicity lost).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace ricci
