#pragma once

#include <stdexcept>
#include <string>

namespace vfence {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value (precondition violation).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Base for tensor-file parse failures.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Bad magic, wrong attribute count, or otherwise unusable header.
class MalformedHeaderError : public ParseError {
public:
  using ParseError::ParseError;
};

/// Payload shorter than the header promises.
class TruncatedPayloadError : public ParseError {
public:
  using ParseError::ParseError;
};

/// Payload contains NaN or infinity.
class NonFiniteValueError : public ParseError {
public:
  using ParseError::ParseError;
};

/// Bytes remain after the declared payload.
class TrailingDataError : public ParseError {
public:
  using ParseError::ParseError;
};

/// Iterative solver failed to reach the requested tolerance.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Caller broke a call-sequence contract (e.g. timestamps going backwards).
class ContractViolationError : public Error {
public:
  using Error::Error;
};

/// A simulation failed to terminate within its wall-time cap.
class TimeoutError : public Error {
public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace vfence
