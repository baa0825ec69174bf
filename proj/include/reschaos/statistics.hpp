#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace reschaos {

/// Nearest-neighbour spacings in units of their own mean.
struct SpacingSample {
  std::vector<double> spacings;
  std::string source;
  std::optional<std::size_t> realization;
};

[[nodiscard]] SpacingSample unfold_spacings(std::span<const double> positions);

/// Positions rescaled to unit mean spacing, first point at zero.
[[nodiscard]] std::vector<double> unfold_positions(std::span<const double> positions);

/// Points of a sorted list that fall inside [lo, hi].
[[nodiscard]] std::vector<double> restrict_to_window(std::span<const double> positions, double lo,
                                                     double hi);

// Reference spacing distributions, all with unit mean.
struct PoissonLaw {};
struct WignerDysonLaw {};
struct SemiPoissonLaw {};
struct BrodyLaw {
  double eta = 0.0;
};
using SpacingLaw = std::variant<PoissonLaw, WignerDysonLaw, SemiPoissonLaw, BrodyLaw>;

/// alpha(eta) = Gamma((eta + 2) / (eta + 1))^(eta + 1).
[[nodiscard]] double brody_alpha(double eta);
[[nodiscard]] double reference_pdf(const SpacingLaw& law, double s);
[[nodiscard]] double reference_cdf(const SpacingLaw& law, double s);

enum class FitMethod { histogram, maximum_likelihood };

[[nodiscard]] std::string_view to_string(FitMethod method) noexcept;
[[nodiscard]] FitMethod fit_method_from_string(std::string_view name);

struct FitOptions {
  FitMethod method = FitMethod::histogram;
  /// Histogram bin width and upper edge, in units of mean spacing.
  double bin_width = 0.25;
  double s_max = 5.0;
  /// Golden-section stopping width on eta.
  double eta_tolerance = 1e-6;
  /// Coarse grid used to bracket the optimum and detect multiple minima.
  int scan_points = 41;
};

struct BrodyFit {
  double eta = 0.0;
  /// Sum of log p_B(s_k; eta) at the fitted eta, whatever the method.
  double log_likelihood = 0.0;
  /// Value of the minimised objective (negative log-likelihood or squared residual).
  double objective = 0.0;
  std::size_t n_samples = 0;
  bool converged = false;
  bool at_boundary = false;
  FitMethod method = FitMethod::histogram;
};

/// Brody log-likelihood of a sample.
[[nodiscard]] double brody_log_likelihood(std::span<const double> spacings, double eta);

/// Objective minimised by fit_brody for the given method.
[[nodiscard]] double brody_fit_objective(std::span<const double> spacings, double eta,
                                         const FitOptions& options = {});

/// Fits eta in [0, 1]. Throws too_few_points below 10 spacings.
[[nodiscard]] BrodyFit fit_brody(const SpacingSample& sample, const FitOptions& options = {});

struct EtaSummary {
  double mean = 0.0;
  /// Sample standard deviation across realizations.
  double std_dev = 0.0;
  std::size_t count = 0;
};

/// Mean and sample standard deviation of eta over realizations. Throws
/// too_few_points with fewer than two fits and fit_failure (naming the
/// realization index) if any fit did not converge.
[[nodiscard]] EtaSummary mean_eta_over_realizations(std::span<const BrodyFit> fits);

struct NumberVarianceCurve {
  std::vector<double> lengths;
  std::vector<double> sigma2;
  std::vector<std::size_t> window_count;
};

/// Sigma^2(L) of unit-mean-spacing positions: windows [B0, B0 + L) start every
/// `stride`, between first + L and last - 2L. Throws window_too_large when
/// some L exceeds a quarter of the span.
[[nodiscard]] NumberVarianceCurve number_variance(std::span<const double> positions,
                                                  std::span<const double> lengths,
                                                  double stride = 0.25);

enum class Sigma2Reference { poisson, semi_poisson, goe };

[[nodiscard]] std::string_view to_string(Sigma2Reference kind) noexcept;

inline constexpr double kEulerGamma = 0.57721566490153286061;

[[nodiscard]] double reference_sigma2(Sigma2Reference kind, double length);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double density = 0.0;
};

/// Equal-width histogram on [0, s_max); density normalised by the full sample size.
[[nodiscard]] std::vector<HistogramBin> spacing_histogram(std::span<const double> spacings,
                                                          double bin_width, double s_max);

}  // namespace reschaos
