#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "reschaos/ensembles.hpp"
#include "reschaos/finite_energy.hpp"
#include "reschaos/resonance_model.hpp"
#include "reschaos/secular_solver.hpp"
#include "reschaos/statistics.hpp"

namespace reschaos {

inline constexpr int kConfigSchemaVersion = 1;

enum class ExperimentKind { brody_sweep, a_scan, spacing_hist, number_variance, phase_grid };

[[nodiscard]] std::string_view to_string(ExperimentKind kind) noexcept;
[[nodiscard]] ExperimentKind experiment_kind_from_string(std::string_view name);

struct BackgroundConfig {
  double r = 0.5;
  double abar = 1.0;
  double ebar = 1.0;

  [[nodiscard]] Background make() const { return Background(r, abar, ebar); }
};

struct NumberVarianceOptions {
  std::vector<double> lengths;  // units of mean spacing
  double stride = 0.25;
};

struct ScanOptions {
  double points_per_spacing = 40.0;
  /// Scan range in field units; defaults cover every pole and zero.
  std::optional<double> b_lo;
  std::optional<double> b_hi;
  std::size_t realization = 0;
};

struct PhaseGridOptions {
  double e_min = 0.0;
  double e_max = 1.0;
  std::size_t e_points = 101;
  double b_points_per_spacing = 40.0;
  std::optional<double> b_lo;
  std::optional<double> b_hi;
  double delta_mu_lo = 0.0;
  double delta_mu_hi = 0.5;
  std::size_t realization = 0;
};

/// Declarative experiment description. Loaded from and stored to JSON with a
/// versioned schema; unknown keys are rejected.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::brody_sweep;
  EnsembleConfig ensemble;
  BackgroundConfig background;
  /// Swept equal widths in units of the mean spacing d (brody_sweep, number_variance).
  std::vector<double> widths;
  FitOptions fit;
  bool pooled_fit = false;
  NumberVarianceOptions number_variance;
  ScanOptions scan;
  PhaseGridOptions phase_grid;
  std::string output_dir = "out";

  void validate() const;
};

[[nodiscard]] ExperimentConfig default_config(ExperimentKind kind);

[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& config);
/// Throws config_error on schema mismatch, unknown keys or invalid values.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& json);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Ensemble config with equal widths width_in_d * d.
[[nodiscard]] EnsembleConfig with_equal_widths(const EnsembleConfig& ensemble, double width_in_d);

/// Dressed positions inside the field window [0, b_max], the sample that the
/// spacing statistics are computed from.
[[nodiscard]] std::vector<double> observed_positions(const BareSpectrum& spectrum,
                                                     const Background& bg);

struct RealizationFit {
  double width = 0.0;
  std::size_t realization = 0;
  std::uint64_t seed = 0;
  BrodyFit fit;
  bool failed = false;
  std::string error;
};

struct BrodySweepRow {
  double width = 0.0;
  EtaSummary summary;
  std::size_t failures = 0;
  std::optional<BrodyFit> pooled;
};

struct BrodySweepResult {
  std::vector<BrodySweepRow> rows;
  std::vector<RealizationFit> fits;
};

/// For each width and realization: bare spectrum -> dressed positions ->
/// unfolded spacings -> Brody fit; then mean and std of eta per width. Throws
/// fit_failure if more than 10% of the realizations of any width fail.
[[nodiscard]] BrodySweepResult run_brody_sweep(const ExperimentConfig& config, unsigned workers = 1);

struct ScanTrace {
  std::vector<double> b;
  std::vector<double> a;
  std::vector<std::uint8_t> masked;
};

struct AScanResult {
  ScanTrace trace;
  BareSpectrum spectrum;
  DressedSpectrum dressed;
  std::vector<double> zeros;
  std::size_t poles_in_range = 0;
  std::size_t zeros_in_range = 0;
  /// Sign changes between consecutive unmasked grid points (poles and zeros the grid resolves).
  std::size_t grid_sign_changes = 0;
  double median_a = 0.0;
  double median_abs_a = 0.0;
  std::uint64_t seed = 0;
};

[[nodiscard]] AScanResult run_a_scan(const ExperimentConfig& config);

/// Scans a(B) of a given spectrum on [b_lo, b_hi] with `points` grid points.
[[nodiscard]] ScanTrace scan_scattering_length(const BareSpectrum& spectrum, const Background& bg,
                                               double b_lo, double b_hi, std::size_t points);

/// Median of the unmasked values of the trace. Throws empty_trace.
[[nodiscard]] double median_scattering_length(const ScanTrace& trace);
/// Median of |a| over the unmasked values.
[[nodiscard]] double median_abs_scattering_length(const ScanTrace& trace);

struct SpacingHistResult {
  std::vector<SpacingSample> samples;
  std::vector<HistogramBin> histogram;
  BrodyFit pooled_fit;
};

[[nodiscard]] SpacingHistResult run_spacing_hist(const ExperimentConfig& config, unsigned workers = 1);

struct NumberVarianceRow {
  double width = 0.0;
  std::vector<double> lengths;
  std::vector<double> sigma2;
  /// Standard error of the mean over realizations.
  std::vector<double> std_error;
  std::vector<std::size_t> window_count;
};

struct NumberVarianceResult {
  std::vector<NumberVarianceRow> rows;
  std::vector<double> lengths;
  std::vector<double> poisson;
  std::vector<double> semi_poisson;
  std::vector<double> goe;
};

[[nodiscard]] NumberVarianceResult run_number_variance(const ExperimentConfig& config,
                                                       unsigned workers = 1);

struct PhaseGridResult {
  PhaseGrid grid;
  BareSpectrum spectrum;
  std::vector<double> poles;
  std::uint64_t seed = 0;
};

[[nodiscard]] PhaseGridResult run_phase_grid(const ExperimentConfig& config, unsigned workers = 1);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite over every realization of the config's ensemble (at each
/// swept width, or the ensemble's own widths when none are swept).
[[nodiscard]] std::vector<ValidationCheck> validate_config(const ExperimentConfig& config,
                                                           unsigned workers = 1);

/// Writes the experiment outputs and manifest into config.output_dir; returns
/// the paths written. `binary` selects the compact phase-grid format.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const BrodySweepResult& result);
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const AScanResult& result);
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const SpacingHistResult& result);
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const NumberVarianceResult& result);
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const PhaseGridResult& result, bool binary);

/// Writes every realization's resonance table plus a manifest with seeds.
std::vector<std::filesystem::path> write_ensemble(const ExperimentConfig& config);

}  // namespace reschaos
