#include "reschaos/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "reschaos/error.hpp"

namespace reschaos::io {

namespace {

constexpr std::array<char, 8> kGridMagic = {'R', 'C', 'G', 'R', 'I', 'D', '0', '1'};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(ErrorKind::io_error, "cannot parse number '" + text + "'");
  }
  return value;
}

void put_u64_le(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw Error(ErrorKind::io_error, "truncated binary grid header");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
  return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::string_view manifest_path,
                     const std::vector<std::string>& header)
    : out_(out) {
  if (!manifest_path.empty()) out_ << "# manifest: " << manifest_path << '\n';
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::cell(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::cell(std::size_t value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view value) {
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

std::ptrdiff_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_line(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size()) {
        throw Error(ErrorKind::io_error, "row has " + std::to_string(cells.size()) +
                                             " cells, header has " + std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw Error(ErrorKind::io_error, "CSV has no header");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  return read_csv(in);
}

void write_resonance_table(std::ostream& out, const BareSpectrum& spectrum, std::string_view manifest_path) {
  std::vector<std::string> header{"index", "B_bare", "Delta"};
  if (spectrum.has_delta_mu()) header.emplace_back("delta_mu");
  CsvWriter csv(out, manifest_path, header);
  const auto pos = spectrum.positions();
  const auto widths = spectrum.widths();
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    csv.cell(i).cell(pos[i]).cell(widths[i]);
    if (spectrum.has_delta_mu()) csv.cell(spectrum.delta_mu()[i]);
    csv.end_row();
  }
}

BareSpectrum read_resonance_table(std::istream& in, double b_max) {
  const auto table = read_csv(in);
  const auto ib = table.column("B_bare");
  const auto iw = table.column("Delta");
  const auto im = table.column("delta_mu");
  if (table.column("index") != 0 || ib < 0 || iw < 0) {
    throw Error(ErrorKind::io_error, "resonance table needs columns index,B_bare,Delta[,delta_mu]");
  }
  std::vector<double> pos, widths, mu;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    pos.push_back(parse_double(row[static_cast<std::size_t>(ib)]));
    widths.push_back(parse_double(row[static_cast<std::size_t>(iw)]));
    if (im >= 0) mu.push_back(parse_double(row[static_cast<std::size_t>(im)]));
  }
  std::optional<std::vector<double>> delta_mu;
  if (im >= 0) delta_mu = std::move(mu);
  return BareSpectrum(b_max, std::move(pos), std::move(widths), std::move(delta_mu));
}

nlohmann::json resonance_table_manifest(const BareSpectrum& spectrum) {
  return {
      {"format", "resonance_table/v1"},
      {"n", spectrum.size()},
      {"b_max", spectrum.b_max()},
      {"units",
       {{"B_bare", "mean spacing d"}, {"Delta", "mean spacing d"}, {"delta_mu", "ebar per d"}}},
  };
}

void save_resonance_table(const std::filesystem::path& csv_path, const BareSpectrum& spectrum) {
  auto manifest_path = csv_path;
  manifest_path += ".json";
  {
    auto out = open_out(csv_path);
    write_resonance_table(out, spectrum, manifest_path.filename().string());
  }
  write_json_file(manifest_path, resonance_table_manifest(spectrum));
}

BareSpectrum load_resonance_table(const std::filesystem::path& csv_path) {
  auto manifest_path = csv_path;
  manifest_path += ".json";
  const auto manifest = read_json_file(manifest_path);
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + csv_path.string() + "'");
  return read_resonance_table(in, manifest.at("b_max").get<double>());
}

void write_dressed_table(std::ostream& out, const DressedSpectrum& dressed, std::string_view manifest_path) {
  CsvWriter csv(out, manifest_path, {"index", "B_res", "Delta_eff"});
  for (std::size_t i = 0; i < dressed.positions_res.size(); ++i) {
    csv.cell(i).cell(dressed.positions_res[i]).cell(dressed.widths_eff[i]);
    csv.end_row();
  }
}

void write_number_variance(std::ostream& out, const NumberVarianceCurve& curve, std::string_view manifest_path) {
  CsvWriter csv(out, manifest_path, {"L", "sigma2", "window_count"});
  for (std::size_t i = 0; i < curve.lengths.size(); ++i) {
    csv.cell(curve.lengths[i]).cell(curve.sigma2[i]).cell(curve.window_count[i]);
    csv.end_row();
  }
}

void write_histogram(std::ostream& out, const std::vector<HistogramBin>& bins, std::string_view manifest_path) {
  CsvWriter csv(out, manifest_path, {"bin_lo", "bin_hi", "count", "density"});
  for (const auto& b : bins) {
    csv.cell(b.lo).cell(b.hi).cell(b.count).cell(b.density);
    csv.end_row();
  }
}

void write_phase_grid_csv(std::ostream& out, const PhaseGrid& grid, std::string_view manifest_path) {
  CsvWriter csv(out, manifest_path, {"E", "B", "sin2_delta", "masked"});
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const auto idx = grid.index(r, c);
      csv.cell(grid.e_values[r]).cell(grid.b_values[c]).cell(grid.sin2[idx]).cell(std::size_t{grid.mask[idx]});
      csv.end_row();
    }
  }
}

void write_phase_grid_binary(std::ostream& out, const PhaseGrid& grid, const nlohmann::json& extra) {
  std::vector<std::size_t> masked;
  for (std::size_t i = 0; i < grid.mask.size(); ++i) {
    if (grid.mask[i] != 0) masked.push_back(i);
  }
  nlohmann::json header = {
      {"format", "phase_grid/v1"},
      {"dtype", "float32-le"},
      {"layout", "row-major (E rows, B columns)"},
      {"rows", grid.rows()},
      {"cols", grid.cols()},
      {"E", grid.e_values},
      {"B", grid.b_values},
      {"mask_offsets", masked},
      {"model", kFiniteEnergyModel},
  };
  if (extra.is_object()) {
    for (const auto& [key, value] : extra.items()) header[key] = value;
  }
  const std::string text = header.dump();
  out.write(kGridMagic.data(), kGridMagic.size());
  put_u64_le(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : grid.sin2) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    std::array<char, 4> bytes{};
    for (int i = 0; i < 4; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    out.write(bytes.data(), 4);
  }
  if (!out) throw Error(ErrorKind::io_error, "failed writing binary grid");
}

BinaryGrid read_phase_grid_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kGridMagic) throw Error(ErrorKind::io_error, "not a phase grid file");
  const auto length = get_u64_le(in);
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw Error(ErrorKind::io_error, "truncated binary grid header");
  BinaryGrid grid;
  grid.header = nlohmann::json::parse(text);
  grid.rows = grid.header.at("rows").get<std::size_t>();
  grid.cols = grid.header.at("cols").get<std::size_t>();
  grid.values.resize(grid.rows * grid.cols);
  for (auto& v : grid.values) {
    std::array<unsigned char, 4> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), 4);
    if (!in) throw Error(ErrorKind::io_error, "truncated binary grid payload");
    std::uint32_t bits = 0;
    for (int i = 3; i >= 0; --i) bits = (bits << 8) | bytes[static_cast<std::size_t>(i)];
    v = std::bit_cast<float>(bits);
  }
  return grid;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw Error(ErrorKind::io_error, "failed writing '" + path.string() + "'");
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::io_error, "invalid JSON in '" + path.string() + "': " + e.what());
  }
}

}  // namespace reschaos::io
