#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppe {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A listening socket could not be bound.
class BindError : public IoError {
public:
    using IoError::IoError;
};

/// Malformed input document. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DuplicateFrameIndex : public ParseError {
public:
    using ParseError::ParseError;
};

class ReplayExhausted : public Error {
public:
    using Error::Error;
};

class BackendUnavailable : public Error {
public:
    using Error::Error;
};

class SingularInnovation : public Error {
public:
    using Error::Error;
};

class InfeasibleAssignment : public Error {
public:
    using Error::Error;
};

class NonMonotonicFrame : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class ZeroVariance : public Error {
public:
    using Error::Error;
};

}  // namespace ppe
