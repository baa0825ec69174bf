#include "reschaos/error.hpp"

namespace reschaos {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::degenerate_positions: return "DegeneratePositions";
    case ErrorKind::pole_proximity: return "PoleProximity";
    case ErrorKind::non_positive_coefficient: return "NonPositiveCoefficient";
    case ErrorKind::bracket_failure: return "BracketFailure";
    case ErrorKind::length_mismatch: return "LengthMismatch";
    case ErrorKind::too_few_points: return "TooFewPoints";
    case ErrorKind::window_too_large: return "WindowTooLarge";
    case ErrorKind::invalid_range: return "InvalidRange";
    case ErrorKind::missing_delta_mu: return "MissingDeltaMu";
    case ErrorKind::empty_trace: return "EmptyTrace";
    case ErrorKind::fit_failure: return "FitFailure";
    case ErrorKind::config_error: return "ConfigError";
    case ErrorKind::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace reschaos
