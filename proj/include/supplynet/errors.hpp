#pragma once

#include <stdexcept>
#include <string>

namespace supplynet {

/// Process exit codes used by the command line tool. Every library error
/// carries one of these so callers can map failures without string matching.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kPrecondition = 3,
  kNonConvergence = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Parameter outside its natural domain (probability not in [0,1], K = 0, ...).
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ExitCode::kValidation, what) {}
};

/// Structural problem with a network (self-loop, duplicate edge, size overflow).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ExitCode::kValidation, what) {}
};

class CyclicGraphError : public Error {
 public:
  CyclicGraphError(const std::string& what, std::size_t from, std::size_t to)
      : Error(ExitCode::kValidation, what), from_(from), to_(to) {}
  /// One edge lying on a directed cycle (0-based node indices).
  std::size_t from() const noexcept { return from_; }
  std::size_t to() const noexcept { return to_; }

 private:
  std::size_t from_;
  std::size_t to_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ExitCode::kValidation, what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A numeric precondition of a theorem-backed computation does not hold
/// (spectral bound on y, unsupported branching regime, ...).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ExitCode::kPrecondition, what) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, std::size_t iterations)
      : Error(ExitCode::kNonConvergence, what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

namespace detail {

inline void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ParameterError(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
  }
}

inline void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw ParameterError(std::string(name) + " must lie in (0,1), got " + std::to_string(v));
  }
}

inline void require_positive(long long v, const char* name) {
  if (v < 1) {
    throw ParameterError(std::string(name) + " must be positive, got " + std::to_string(v));
  }
}

}  // namespace detail
}  // namespace supplynet
