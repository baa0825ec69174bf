#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "reschaos/resonance_model.hpp"

namespace reschaos {

inline constexpr std::string_view kGeneratorId = "mt19937_64/splitmix64/v1";

/// Seeded source of uniforms. Wraps std::mt19937_64, whose output sequence is
/// fixed by the standard, and converts to doubles by hand so results do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1]; safe to take the logarithm of.
  double uniform_open_zero();
  double uniform(double lo, double hi);
  /// Exponential variate with the given rate.
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of realization k: mix64(master + (k + 1) * 0x9E3779B97F4A7C15).
[[nodiscard]] std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Independent sub-stream of a realization seed (positions, widths, delta_mu, ...).
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

enum class EnsembleKind { poisson, wigner_dyson, semi_poisson };

[[nodiscard]] std::string_view to_string(EnsembleKind kind) noexcept;
[[nodiscard]] EnsembleKind ensemble_kind_from_string(std::string_view name);

struct EqualWidths {
  double delta = 1.0;
};
struct ExplicitWidths {
  std::vector<double> values;
};
struct LogUniformWidths {
  double delta_min = 1.0;
  double delta_max = 1.0;
};
using WidthRule = std::variant<EqualWidths, ExplicitWidths, LogUniformWidths>;

struct EnsembleConfig {
  std::size_t n = 50;
  double b_max = 50.0;
  EnsembleKind kind = EnsembleKind::poisson;
  WidthRule widths = EqualWidths{};
  std::uint64_t master_seed = 1;
  std::size_t realization_count = 25;

  /// Throws invalid_argument / invalid_range on a broken config.
  void validate() const;
};

[[nodiscard]] std::vector<double> sample_poisson_positions(std::size_t n, double b_max,
                                                           std::uint64_t seed);
[[nodiscard]] std::vector<double> sample_wd_positions(std::size_t n, double b_max,
                                                      std::uint64_t seed);
[[nodiscard]] std::vector<double> sample_semi_poisson_positions(std::size_t n, double b_max,
                                                                std::uint64_t seed);

/// Inverse-CDF Wigner-Dyson spacing, unit mean: 2 sqrt(ln(1/u) / pi).
[[nodiscard]] double wd_spacing_from_uniform(double u) noexcept;

[[nodiscard]] std::vector<double> sample_wd_spacings(std::size_t count, std::uint64_t seed);
/// Sum of two rate-2 exponentials: density 4 s exp(-2 s), unit mean.
[[nodiscard]] std::vector<double> sample_semi_poisson_spacings(std::size_t count,
                                                               std::uint64_t seed);
[[nodiscard]] std::vector<double> sample_exponential_spacings(std::size_t count,
                                                              std::uint64_t seed);
/// Brody(eta) spacings by inverse CDF (ln(1/u) / alpha)^(1/(eta+1)).
[[nodiscard]] std::vector<double> sample_brody_spacings(double eta, std::size_t count,
                                                        std::uint64_t seed);

[[nodiscard]] std::vector<double> assign_widths(const WidthRule& rule, std::size_t n,
                                                std::uint64_t seed);

/// Lower bound below which sampled delta_mu values are floored (energy per field unit).
inline constexpr double kDeltaMuFloor = 1e-6;

[[nodiscard]] std::vector<double> sample_delta_mu(std::size_t n, double lo, double hi,
                                                  std::uint64_t seed);

struct Realization {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  BareSpectrum spectrum;
};

/// Realization k of the ensemble; reproducible in isolation from (config, k).
[[nodiscard]] Realization generate_realization(const EnsembleConfig& config, std::size_t index);

/// Same, with delta_mu drawn uniformly from [lo, hi] (floored at kDeltaMuFloor).
[[nodiscard]] Realization generate_realization(const EnsembleConfig& config, std::size_t index,
                                               double delta_mu_lo, double delta_mu_hi);

}  // namespace reschaos
