#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace villa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// Malformed input record. `line` is 1-based; 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0)
      : Error(message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Remote call failed after retries. `status` is the last HTTP status, or 0
/// if no response arrived.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int status = 0)
      : Error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// A backend returned something that violates the caller's contract
/// (wrong vector length, non-finite values, missing fields).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

/// The responder output contained no usable JSON object.
class MalformedResponse : public Error {
 public:
  using Error::Error;
};

/// On-disk store could not be decoded. `offset` is the byte position at
/// which decoding failed.
class StoreFormatError : public Error {
 public:
  StoreFormatError(const std::string& message, std::size_t offset)
      : Error(message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace villa
