#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scalebreak {

// Base of every error thrown by the library. The CLI maps the concrete type
// to an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DegenerateModel : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t record, const std::string& what)
      : Error(record > 0 ? "record " + std::to_string(record) + ": " + what : what),
        record_(record) {}

  /// 1-based record number, 0 when the error is not tied to one record.

  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

}  // namespace scalebreak
