#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reschaos {

enum class ErrorKind {
  invalid_argument,
  degenerate_positions,
  pole_proximity,
  non_positive_coefficient,
  bracket_failure,
  length_mismatch,
  too_few_points,
  window_too_large,
  invalid_range,
  missing_delta_mu,
  empty_trace,
  fit_failure,
  config_error,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so that
/// callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace reschaos
