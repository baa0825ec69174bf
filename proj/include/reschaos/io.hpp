#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "reschaos/finite_energy.hpp"
#include "reschaos/resonance_model.hpp"
#include "reschaos/statistics.hpp"

namespace reschaos::io {

/// Shortest round-trip decimal representation; "nan" for NaN.
[[nodiscard]] std::string format_double(double value);

/// Writes CSV rows, starting with the `# manifest: <path>` comment line when a
/// manifest path is given.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::string_view manifest_path, const std::vector<std::string>& header);

  CsvWriter& cell(double value);
  CsvWriter& cell(std::size_t value);
  CsvWriter& cell(std::string_view value);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

/// Parsed CSV: header names and string cells; comment lines (#) are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::ptrdiff_t column(std::string_view name) const;
};

[[nodiscard]] CsvTable read_csv(std::istream& in);
[[nodiscard]] CsvTable read_csv_file(const std::filesystem::path& path);

/// Resonance table `index,B_bare,Delta[,delta_mu]`.
void write_resonance_table(std::ostream& out, const BareSpectrum& spectrum,
                           std::string_view manifest_path = {});
/// Reads a resonance table; b_max comes from the sidecar manifest.
[[nodiscard]] BareSpectrum read_resonance_table(std::istream& in, double b_max);

/// Sidecar manifest for a standalone resonance table (units and range).
[[nodiscard]] nlohmann::json resonance_table_manifest(const BareSpectrum& spectrum);
void save_resonance_table(const std::filesystem::path& csv_path, const BareSpectrum& spectrum);
[[nodiscard]] BareSpectrum load_resonance_table(const std::filesystem::path& csv_path);

/// `index,B_res,Delta_eff`.
void write_dressed_table(std::ostream& out, const DressedSpectrum& dressed,
                         std::string_view manifest_path = {});

/// `L,sigma2,window_count`.
void write_number_variance(std::ostream& out, const NumberVarianceCurve& curve,
                           std::string_view manifest_path = {});

/// `bin_lo,bin_hi,count,density`.
void write_histogram(std::ostream& out, const std::vector<HistogramBin>& bins,
                     std::string_view manifest_path = {});

/// Long-form grid `E,B,sin2_delta,masked`.
void write_phase_grid_csv(std::ostream& out, const PhaseGrid& grid,
                          std::string_view manifest_path = {});

/// Binary grid: magic "RCGRID01", little-endian u64 header length, JSON header
/// (dims, axes, mask offsets, dtype), then rows*cols float32 sin^2(delta)
/// values in row-major order with NaN at masked cells.
void write_phase_grid_binary(std::ostream& out, const PhaseGrid& grid, const nlohmann::json& extra = {});

struct BinaryGrid {
  nlohmann::json header;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;
};

[[nodiscard]] BinaryGrid read_phase_grid_binary(std::istream& in);

void write_text_file(const std::filesystem::path& path, std::string_view content);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& value);
[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace reschaos::io
