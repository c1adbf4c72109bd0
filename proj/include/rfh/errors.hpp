#pragma once

#include <stdexcept>
#include <string>

namespace rfh {

// Failure classes. The CLI maps each kind onto a fixed process exit code.
enum class ErrorKind {
  config = 2,
  solver = 3,
  mismatch = 4,
  lifting = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct SolverError : Error {
  explicit SolverError(const std::string& what) : Error(ErrorKind::solver, what) {}
};

struct MismatchError : Error {
  explicit MismatchError(const std::string& what) : Error(ErrorKind::mismatch, what) {}
};

struct LiftingError : Error {
  explicit LiftingError(const std::string& what) : Error(ErrorKind::lifting, what) {}
};

// Shape errors in the algebra layer (mismatched matrix sizes, bad boundary
// dimensions) are programming errors rather than run failures.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace rfh
