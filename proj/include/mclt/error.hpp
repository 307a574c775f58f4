#pragma once

#include <stdexcept>
#include <string>

namespace mclt {

enum class ErrorCode {
  InvalidArgument = 1,
  Precondition = 2,
  Numeric = 3,
  Parse = 4,
  Io = 5,
  Internal = 6,
};

/// Base exception for every failure raised by the library. The code maps
/// one-to-one onto the status values of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& w) : Error(ErrorCode::InvalidArgument, w) {}
};

// A kernel or construction requirement (e.g. V_n^2 = 1 a.s.) is not met.
class PreconditionFailed : public Error {
 public:
  explicit PreconditionFailed(const std::string& w) : Error(ErrorCode::Precondition, w) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& w) : Error(ErrorCode::Numeric, w) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& w) : Error(ErrorCode::Parse, w) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& w) : Error(ErrorCode::Io, w) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& w) : Error(ErrorCode::Internal, w) {}
};

}  // namespace mclt
