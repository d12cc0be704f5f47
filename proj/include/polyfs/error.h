#pragma once

#include <stdexcept>
#include <string>

namespace polyfs {

/// Error categories; each maps to one CLI exit code.
enum class ErrorKind { Io, Data, Numerical, Config };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct IoError : Error {
  explicit IoError(const std::string &what) : Error(ErrorKind::Io, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string &what) : Error(ErrorKind::Data, what) {}
};

/// Shape violations, e.g. asking for k orthonormal columns in fewer than k
/// dimensions.
struct DimensionError : DataError {
  explicit DimensionError(const std::string &what) : DataError(what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string &what)
      : Error(ErrorKind::Numerical, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string &what)
      : Error(ErrorKind::Config, what) {}
};

/// 2 = I/O, 3 = data validation, 4 = numerical failure, 5 = config.
constexpr int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Numerical: return 4;
    case ErrorKind::Config: return 5;
  }
  return 1;
}

}  // namespace polyfs
