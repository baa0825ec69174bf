#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace reschaos {

/// Entrance-channel parameters. Lengths are measured in units of abar and
/// energies in units of ebar; a_bg = r * abar always.
class Background {
 public:
  explicit Background(double r, double abar = 1.0, double ebar = 1.0);

  [[nodiscard]] double r() const noexcept { return r_; }
  [[nodiscard]] double abar() const noexcept { return abar_; }
  [[nodiscard]] double ebar() const noexcept { return ebar_; }
  [[nodiscard]] double a_bg() const noexcept { return r_ * abar_; }

 private:
  double r_;
  double abar_;
  double ebar_;
};

/// Uncoupled resonance inputs on the field range [0, b_max].
///
/// Positions must be strictly increasing; exact degeneracies are rejected with
/// ErrorKind::degenerate_positions. Non-positive widths are accepted (the
/// scattering-length formula does not care) but reported by
/// has_non_positive_widths() because the bracketing solver needs them positive.
class BareSpectrum {
 public:
  BareSpectrum(double b_max, std::vector<double> positions, std::vector<double> widths,
               std::optional<std::vector<double>> delta_mu = std::nullopt);

  [[nodiscard]] double b_max() const noexcept { return b_max_; }
  [[nodiscard]] std::size_t size() const noexcept { return positions_.size(); }
  [[nodiscard]] bool empty() const noexcept { return positions_.empty(); }
  [[nodiscard]] std::span<const double> positions() const noexcept { return positions_; }
  [[nodiscard]] std::span<const double> widths() const noexcept { return widths_; }
  [[nodiscard]] bool has_delta_mu() const noexcept { return delta_mu_.has_value(); }
  [[nodiscard]] std::span<const double> delta_mu() const;

  /// Mean bare spacing d = b_max / N (b_max itself when N = 0).
  [[nodiscard]] double mean_spacing() const noexcept;
  [[nodiscard]] bool has_non_positive_widths() const noexcept;

 private:
  double b_max_;
  std::vector<double> positions_;
  std::vector<double> widths_;
  std::optional<std::vector<double>> delta_mu_;
};

struct DressedSpectrum {
  std::vector<double> positions_res;
  std::vector<double> widths_eff;
};

/// Absolute distance (field units) below which an evaluation point counts as
/// sitting on a pole.
struct PoleGuard {
  double epsilon = 1e-12;

  static PoleGuard for_spectrum(const BareSpectrum& spectrum, double relative = 1e-12);
};

/// Open-channel shift of a resonance of local width `width`:
/// r(1 - r) / (1 + (1 - r)^2) * width.
[[nodiscard]] double resonance_shift(double width, double r) noexcept;

[[nodiscard]] std::vector<double> shift_table(const BareSpectrum& spectrum, const Background& bg);

/// F(b) = 1 - sum_j coeffs_j / (b - poles_j). Throws pole_proximity when b is
/// within the guard of a pole or of a zero of F.
[[nodiscard]] double secular_value(double b, std::span<const double> coeffs,
                                   std::span<const double> poles, PoleGuard guard = {});

/// F'(b) = sum_j coeffs_j / (b - poles_j)^2, unguarded.
[[nodiscard]] double secular_derivative(double b, std::span<const double> coeffs,
                                        std::span<const double> poles) noexcept;

/// Local denominator D_i(b) = b - B_i - dB_i - sum_{j != i} (b - B_i)/(b - B_j) dB_j,
/// evaluated term by term.
[[nodiscard]] double local_denominator(std::size_t i, double b, const BareSpectrum& spectrum,
                                       std::span<const double> shifts);

/// N-resonance scattering length in units of abar, via the consolidated form
/// a_bg * (1 - G(b)/F(b)) with G(b) = sum_i Delta_i / (b - B_i).
[[nodiscard]] double scattering_length(double b, const BareSpectrum& spectrum,
                                       const Background& bg, PoleGuard guard = {});

/// Same quantity summed literally over the local denominators; O(N^2).
[[nodiscard]] double scattering_length_direct(double b, const BareSpectrum& spectrum,
                                              const Background& bg, PoleGuard guard = {});

/// a_bg * prod_i (1 - widths_eff_i / (b - positions_res_i)).
[[nodiscard]] double product_form_value(double b, const DressedSpectrum& dressed,
                                        const Background& bg, PoleGuard guard = {});

}  // namespace reschaos
