#pragma once

#include <stdexcept>
#include <string>

namespace sattn {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kUsage,      // bad flags, config keys, or arguments
  kData,       // malformed or inconsistent input data
  kShape,      // tensor shape mismatch
  kNumerical,  // non-finite values, invalid distribution parameters
  kFormat,     // checkpoint format problems
  kIo,         // filesystem failures
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorKind::kUsage, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorKind::kData, message) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message)
      : Error(ErrorKind::kShape, message) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error(ErrorKind::kNumerical, message) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message)
      : Error(ErrorKind::kFormat, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorKind::kIo, message) {}
};

}  // namespace sattn
