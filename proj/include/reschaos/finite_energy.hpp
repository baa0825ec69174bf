#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "reschaos/resonance_model.hpp"

namespace reschaos {

/// Label attached to every finite-energy output: the phase is modelled as
/// tan(delta) = -k a_eff(E, B), with bare crossings translated linearly in E.
inline constexpr const char* kFiniteEnergyModel =
    "approximation: tan(delta) = -k*a_eff(E,B), bare positions B_k + E/delta_mu_k";

struct ShiftedSpectrum {
  BareSpectrum spectrum;
  /// permutation[i] is the original index of the i-th (sorted) shifted resonance.
  std::vector<std::size_t> permutation;
};

/// Bare crossings moved to B_k + E / delta_mu_k, re-sorted. Throws
/// missing_delta_mu without a delta_mu column and degenerate_positions if two
/// shifted crossings coincide.
[[nodiscard]] ShiftedSpectrum energy_shifted_spectrum(const BareSpectrum& spectrum, double energy);

/// Wave number in units of 1/abar: k abar = sqrt(E / ebar).
[[nodiscard]] double wave_number(double energy, const Background& bg);

/// s-wave phase shift delta(E, B) = -atan(k a_eff) in radians; zero at E = 0.
[[nodiscard]] double phase_shift(double energy, double b, const BareSpectrum& spectrum,
                                 const Background& bg, PoleGuard guard = {});

[[nodiscard]] double sin2_delta(double energy, double b, const BareSpectrum& spectrum,
                                const Background& bg, PoleGuard guard = {});

struct PhaseGridSpec {
  std::vector<double> e_values;
  std::vector<double> b_values;
  BareSpectrum spectrum;
  Background bg;
  PoleGuard guard{};

  void validate() const;
};

/// Row-major (energy, field) grid. Masked cells hold NaN in both matrices.
struct PhaseGrid {
  std::vector<double> e_values;
  std::vector<double> b_values;
  std::vector<double> sin2;
  std::vector<double> phase;
  std::vector<std::uint8_t> mask;

  [[nodiscard]] std::size_t rows() const noexcept { return e_values.size(); }
  [[nodiscard]] std::size_t cols() const noexcept { return b_values.size(); }
  [[nodiscard]] std::size_t index(std::size_t row, std::size_t col) const noexcept {
    return row * b_values.size() + col;
  }
  [[nodiscard]] std::size_t masked_count() const noexcept;
};

/// Evaluates the grid with `workers` threads, one row at a time; the result does
/// not depend on the worker count.
[[nodiscard]] PhaseGrid sin2_delta_grid(const PhaseGridSpec& spec, unsigned workers = 1);

/// Fields at which a row of phases crosses a resonance. With positive widths
/// delta drifts monotonically between poles and jumps the opposite way at each
/// one, so every step against the drift marks a pole. Resolved crossings are
/// placed by linear interpolation of cot(delta); a masked run is placed at its
/// centre and an unresolved one at the cell midpoint.
[[nodiscard]] std::vector<double> locate_ridges(std::span<const double> b_values,
                                                std::span<const double> phase_row,
                                                std::span<const std::uint8_t> mask_row);

}  // namespace reschaos
