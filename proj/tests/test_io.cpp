#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "reschaos/ensembles.hpp"
#include "reschaos/error.hpp"
#include "reschaos/experiments.hpp"
#include "reschaos/io.hpp"

using namespace reschaos;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("reschaos_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles round trip through text") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125}) CHECK(std::stod(io::format_double(x)) == x);
  CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("csv writer and reader") {
  std::stringstream ss;
  {
    io::CsvWriter w(ss, "manifest.json", {"a", "b"});
    w.cell(1.5).cell(std::size_t{2});
    w.end_row();
  }
  CHECK(ss.str().rfind("# manifest: manifest.json\n", 0) == 0);
  const auto table = io::read_csv(ss);
  CHECK(table.header == std::vector<std::string>{"a", "b"});
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][0] == "1.5");
  CHECK(table.column("b") == 1);
  CHECK(table.column("c") < 0);
}

TEST_CASE("resonance table round trip") {
  EnsembleConfig config;
  config.widths = LogUniformWidths{0.1, 3.0};
  const auto r = generate_realization(config, 2, 0.0, 0.5);
  const auto dir = scratch_dir("table");
  const auto path = dir / "table.csv";
  io::save_resonance_table(path, r.spectrum);
  CHECK(fs::exists(dir / "table.csv.json"));
  const auto back = io::load_resonance_table(path);
  CHECK(back.b_max() == r.spectrum.b_max());
  REQUIRE(back.size() == r.spectrum.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.positions()[i] == r.spectrum.positions()[i]);
    CHECK(back.widths()[i] == r.spectrum.widths()[i]);
    CHECK(back.delta_mu()[i] == r.spectrum.delta_mu()[i]);
  }

  std::stringstream no_mu("index,B_bare,Delta\n0,1.0,0.5\n1,2.0,0.25\n");
  const auto plain = io::read_resonance_table(no_mu, 3.0);
  CHECK_FALSE(plain.has_delta_mu());
  CHECK(plain.widths()[1] == 0.25);

  std::stringstream broken("pos,width\n1,2\n");
  CHECK_THROWS_AS((void)io::read_resonance_table(broken, 3.0), Error);
}

TEST_CASE("binary phase grid round trip") {
  PhaseGrid grid;
  grid.e_values = {0.0, 0.5};
  grid.b_values = {1.0, 2.0, 3.0};
  grid.sin2 = {0.0, 0.0, 0.0, 0.25, std::numeric_limits<double>::quiet_NaN(), 0.75};
  grid.phase = grid.sin2;
  grid.mask = {0, 0, 0, 0, 1, 0};
  std::stringstream ss;
  io::write_phase_grid_binary(ss, grid, {{"model", "test"}});
  CHECK(ss.str().substr(0, 8) == "RCGRID01");
  const auto back = io::read_phase_grid_binary(ss);
  CHECK(back.rows == 2);
  CHECK(back.cols == 3);
  CHECK(back.values[3] == 0.25f);
  CHECK(std::isnan(back.values[4]));
  CHECK(back.header.at("mask_offsets") == nlohmann::json::array({4}));
  CHECK(back.header.at("dtype") == "float32-le");

  std::stringstream junk("NOTAGRID........");
  CHECK_THROWS_AS((void)io::read_phase_grid_binary(junk), Error);
}

TEST_CASE("config round trip") {
  for (auto kind : {ExperimentKind::brody_sweep, ExperimentKind::a_scan, ExperimentKind::spacing_hist,
                    ExperimentKind::number_variance, ExperimentKind::phase_grid}) {
    auto config = default_config(kind);
    config.ensemble.widths = LogUniformWidths{0.5, 2.0};
    config.scan.b_lo = -3.0;
    const auto j = to_json(config);
    const auto back = config_from_json(j);
    CHECK(to_json(back) == j);
  }
  const auto dir = scratch_dir("config");
  io::write_json_file(dir / "c.json", to_json(default_config(ExperimentKind::a_scan)));
  CHECK(load_config(dir / "c.json").kind == ExperimentKind::a_scan);
}

TEST_CASE("config rejects unknown keys and bad values") {
  auto j = to_json(default_config(ExperimentKind::brody_sweep));
  j["ensemble"]["colour"] = "red";
  try {
    (void)config_from_json(j);
    FAIL("expected config_error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config_error);
  }
  auto v = to_json(default_config(ExperimentKind::brody_sweep));
  v["schema_version"] = 99;
  CHECK_THROWS_AS((void)config_from_json(v), Error);
  auto w = to_json(default_config(ExperimentKind::brody_sweep));
  w["ensemble"]["n"] = 0;
  CHECK_THROWS_AS((void)config_from_json(w), Error);
  auto x = to_json(default_config(ExperimentKind::brody_sweep));
  x["fit"]["method"] = "chi_by_eye";
  CHECK_THROWS_AS((void)config_from_json(x), Error);
}

}  // TEST_SUITE
