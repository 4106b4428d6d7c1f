#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smdeim {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t pivot, const std::string& what)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Raised by DEIM when the candidate columns are numerically dependent.
class RankError : public Error {
 public:
  RankError(std::size_t step, const std::string& what) : Error(what), step_(step) {}
  /// 1-based position of the offending basis column.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class PatternViolation : public Error {
 public:
  PatternViolation(std::size_t row, std::size_t col, const std::string& what)
      : Error(what), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_, col_;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class MemoryGuardError : public Error {
 public:
  using Error::Error;
};

class NewtonError : public Error {
 public:
  NewtonError(std::size_t step, std::size_t stage, double residual, const std::string& what)
      : Error(what), step_(step), stage_(stage), residual_(residual) {}
  std::size_t step() const noexcept { return step_; }
  std::size_t stage() const noexcept { return stage_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t step_, stage_;
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace smdeim
