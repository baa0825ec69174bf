#pragma once

#include <span>
#include <vector>

#include "reschaos/resonance_model.hpp"

namespace reschaos {

struct SolverOptions {
  /// Absolute root tolerance in field units.
  double tol = 1e-12;
  /// Bracket endpoints are kept this fraction of the local gap away from poles.
  double pole_offset = 1e-13;
  int max_iterations = 200;
};

/// All N zeros of 1 - sum_j c_j / (b - p_j) for strictly positive c_j and
/// strictly increasing p_j. Root k lies in (p_k, p_{k+1}); the last one lies
/// in (p_N, p_N + sum c]. Throws non_positive_coefficient or bracket_failure.
[[nodiscard]] std::vector<double> solve_secular(std::span<const double> coeffs,
                                                std::span<const double> poles,
                                                const SolverOptions& options = {});

/// Root acceptance test: |F(root)| < tolerance, or F changes sign within `ulps`
/// representable doubles on either side of root. The second clause covers roots
/// so close to a pole that no double reaches the residual tolerance.
[[nodiscard]] bool root_converged(double root, std::span<const double> coeffs,
                                  std::span<const double> poles, double tolerance = 1e-9,
                                  int ulps = 4);

struct SecularScan {
  std::vector<double> roots;
  /// Set whenever the scan path was used; the root count is then not guaranteed.
  bool warning = false;
};

/// Sign-scan fallback for arbitrary real coefficients. Scans each inter-pole
/// interval of [p_1 - sum|c|, p_N + sum|c|] on a grid of `points_per_gap`
/// points and bisects every sign change that is not a pole.
[[nodiscard]] SecularScan scan_secular(std::span<const double> coeffs,
                                       std::span<const double> poles, int points_per_gap = 400,
                                       const SolverOptions& options = {});

/// Dressed resonance positions (zeros of the secular function built from the shifts).
[[nodiscard]] std::vector<double> find_resonance_positions(const BareSpectrum& spectrum,
                                                           const Background& bg,
                                                           const SolverOptions& options = {});

/// Zeros of a(B): zeros of 1 - sum_i (dB_i + Delta_i) / (B - B_i).
[[nodiscard]] std::vector<double> find_scattering_zeros(const BareSpectrum& spectrum,
                                                        const Background& bg,
                                                        const SolverOptions& options = {});

/// Sorted-index pairing: widths_i = zeros_i - positions_res_i.
[[nodiscard]] std::vector<double> effective_widths(std::span<const double> positions_res,
                                                   std::span<const double> zeros);

struct DressResult {
  DressedSpectrum dressed;
  /// True when the fallback scan was needed (non-positive shifts or widths).
  bool used_fallback = false;
};

/// Positions, zeros and effective widths in one go. Uses solve_secular when all
/// coefficients are positive and the scan fallback otherwise.
[[nodiscard]] DressResult dress(const BareSpectrum& spectrum, const Background& bg,
                                const SolverOptions& options = {});

}  // namespace reschaos
