#pragma once

#include <stdexcept>
#include <string>

namespace concord {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input contains NaN/Inf or is otherwise unusable.
class invalid_data_error : public error {
 public:
  using error::error;
};

/// Fewer observations than the operation requires.
class insufficient_data_error : public error {
 public:
  using error::error;
};

/// A parameter is outside its admissible range (threshold, bandwidth, ...).
class invalid_argument_error : public error {
 public:
  using error::error;
};

/// A covariance specification is not positive semidefinite.
class invalid_covariance_error : public error {
 public:
  using error::error;
};

/// The operation is undefined on this input (zero variance, zero denominator).
class degenerate_error : public error {
 public:
  using error::error;
};

/// A numerical routine (quadrature, optimizer) failed to converge.
class numeric_error : public error {
 public:
  using error::error;
};

/// Malformed input file. `line` is 1-based, 0 when not line-specific.
class parse_error : public error {
 public:
  parse_error(const std::string& msg, std::size_t line)
      : error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Bad run configuration (missing column, contradictory options).
class config_error : public error {
 public:
  using error::error;
};

}  // namespace concord
