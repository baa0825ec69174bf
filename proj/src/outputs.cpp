#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "reschaos/error.hpp"
#include "reschaos/experiments.hpp"
#include "reschaos/io.hpp"

namespace reschaos {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestName = "manifest.json";

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json realization_seeds(const EnsembleConfig& ensemble) {
  json seeds = json::array();
  for (std::size_t k = 0; k < ensemble.realization_count; ++k) {
    seeds.push_back(realization_seed(ensemble.master_seed, k));
  }
  return seeds;
}

json base_manifest(const ExperimentConfig& config) {
  return {
      {"tool", "reschaos"},
      {"experiment", to_string(config.kind)},
      {"config", to_json(config)},
      {"master_seed", config.ensemble.master_seed},
      {"generator", kGeneratorId},
      {"realization_seeds", realization_seeds(config.ensemble)},
      {"units",
       {{"field", "mean bare spacing d = b_max / n"},
        {"length", "abar"},
        {"energy", "ebar"},
        {"delta_mu", "ebar per d"}}},
      {"created_utc", utc_timestamp()},
  };
}

class OutputSet {
 public:
  explicit OutputSet(const ExperimentConfig& config) : dir_(config.output_dir), manifest_(base_manifest(config)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::io_error, "cannot create output directory '" + dir_.string() + "'");
  }

  // Opens a CSV under the output directory; manifest path is relative to the file.
  template <typename Fn>
  void csv(const std::string& name, Fn&& write) {
    const fs::path path = dir_ / name;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
    const auto manifest_rel = fs::relative(dir_ / kManifestName, path.parent_path()).generic_string();
    write(out, manifest_rel);
    if (!out) throw Error(ErrorKind::io_error, "failed writing '" + path.string() + "'");
    files_.push_back(path);
    manifest_["outputs"].push_back(name);
  }

  void binary(const std::string& name, const std::function<void(std::ostream&)>& write) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
    write(out);
    files_.push_back(path);
    manifest_["outputs"].push_back(name);
  }

  json& manifest() { return manifest_; }

  std::vector<fs::path> finish() {
    const fs::path path = dir_ / kManifestName;
    io::write_json_file(path, manifest_);
    files_.push_back(path);
    return files_;
  }

 private:
  fs::path dir_;
  json manifest_;
  std::vector<fs::path> files_;
};

}  // namespace

std::vector<fs::path> write_outputs(const ExperimentConfig& config, const BrodySweepResult& result) {
  OutputSet out(config);
  out.csv("brody_sweep.csv", [&](std::ostream& os, const std::string& m) {
    std::vector<std::string> header{"width", "mean_eta", "std_eta", "count", "failures"};
    if (config.pooled_fit) header.emplace_back("pooled_eta");
    io::CsvWriter csv(os, m, header);
    for (const auto& row : result.rows) {
      csv.cell(row.width).cell(row.summary.mean).cell(row.summary.std_dev).cell(row.summary.count).cell(row.failures);
      if (config.pooled_fit) csv.cell(row.pooled ? row.pooled->eta : std::numeric_limits<double>::quiet_NaN());
      csv.end_row();
    }
  });
  json width_files = json::array();
  for (std::size_t w = 0; w < result.rows.size(); ++w) {
    const std::string name = "fits/width_" + std::to_string(w) + ".csv";
    out.csv(name, [&](std::ostream& os, const std::string& m) {
      io::CsvWriter csv(os, m, {"realization", "eta", "loglik", "converged"});
      for (const auto& f : result.fits) {
        if (f.width != result.rows[w].width) continue;
        csv.cell(f.realization);
        if (f.failed && f.fit.n_samples == 0) {
          csv.cell(std::numeric_limits<double>::quiet_NaN()).cell(std::numeric_limits<double>::quiet_NaN());
        } else {
          csv.cell(f.fit.eta).cell(f.fit.log_likelihood);
        }
        csv.cell(std::size_t{f.failed ? 0u : 1u});
        csv.end_row();
      }
    });
    width_files.push_back({{"file", name}, {"width", result.rows[w].width}});
  }
  out.manifest()["per_width_fits"] = width_files;
  out.manifest()["fit_method"] = to_string(config.fit.method);
  return out.finish();
}

std::vector<fs::path> write_outputs(const ExperimentConfig& config, const AScanResult& result) {
  OutputSet out(config);
  out.csv("a_scan.csv", [&](std::ostream& os, const std::string& m) {
    io::CsvWriter csv(os, m, {"B", "a", "masked"});
    for (std::size_t i = 0; i < result.trace.b.size(); ++i) {
      csv.cell(result.trace.b[i]).cell(result.trace.a[i]).cell(std::size_t{result.trace.masked[i]});
      csv.end_row();
    }
  });
  out.csv("dressed.csv", [&](std::ostream& os, const std::string& m) { io::write_dressed_table(os, result.dressed, m); });
  out.csv("bare.csv", [&](std::ostream& os, const std::string& m) { io::write_resonance_table(os, result.spectrum, m); });
  out.manifest()["diagnostics"] = {
      {"poles_in_range", result.poles_in_range},
      {"zeros_in_range", result.zeros_in_range},
      {"grid_sign_changes", result.grid_sign_changes},
      {"median_a", result.median_a},
      {"median_abs_a", result.median_abs_a},
      {"realization_seed", result.seed},
  };
  return out.finish();
}

std::vector<fs::path> write_outputs(const ExperimentConfig& config, const SpacingHistResult& result) {
  OutputSet out(config);
  out.csv("spacings.csv", [&](std::ostream& os, const std::string& m) {
    io::CsvWriter csv(os, m, {"realization", "index", "s"});
    for (const auto& sample : result.samples) {
      for (std::size_t i = 0; i < sample.spacings.size(); ++i) {
        csv.cell(sample.realization.value_or(0)).cell(i).cell(sample.spacings[i]);
        csv.end_row();
      }
    }
  });
  out.csv("histogram.csv", [&](std::ostream& os, const std::string& m) { io::write_histogram(os, result.histogram, m); });
  out.csv("reference_pdf.csv", [&](std::ostream& os, const std::string& m) {
    io::CsvWriter csv(os, m, {"s", "poisson", "wigner_dyson", "semi_poisson", "brody_fit"});
    for (int i = 0; i <= 400; ++i) {
      const double s = config.fit.s_max * i / 400.0;
      csv.cell(s)
          .cell(reference_pdf(PoissonLaw{}, s))
          .cell(reference_pdf(WignerDysonLaw{}, s))
          .cell(reference_pdf(SemiPoissonLaw{}, s))
          .cell(reference_pdf(BrodyLaw{result.pooled_fit.eta}, s));
      csv.end_row();
    }
  });
  out.manifest()["pooled_fit"] = {{"eta", result.pooled_fit.eta},
                                  {"n_samples", result.pooled_fit.n_samples},
                                  {"converged", result.pooled_fit.converged},
                                  {"method", to_string(result.pooled_fit.method)}};
  return out.finish();
}

std::vector<fs::path> write_outputs(const ExperimentConfig& config, const NumberVarianceResult& result) {
  OutputSet out(config);
  json curves = json::array();
  for (std::size_t w = 0; w < result.rows.size(); ++w) {
    const auto& row = result.rows[w];
    const std::string name = "number_variance/width_" + std::to_string(w) + ".csv";
    out.csv(name, [&](std::ostream& os, const std::string& m) {
      io::write_number_variance(os, NumberVarianceCurve{row.lengths, row.sigma2, row.window_count}, m);
    });
    curves.push_back({{"file", name}, {"width", row.width}, {"std_error", row.std_error}});
  }
  out.csv("number_variance/reference.csv", [&](std::ostream& os, const std::string& m) {
    io::CsvWriter csv(os, m, {"L", "poisson", "semi_poisson", "goe"});
    for (std::size_t i = 0; i < result.lengths.size(); ++i) {
      csv.cell(result.lengths[i]).cell(result.poisson[i]).cell(result.semi_poisson[i]).cell(result.goe[i]);
      csv.end_row();
    }
  });
  out.manifest()["curves"] = curves;
  out.manifest()["stride"] = config.number_variance.stride;
  out.manifest()["goe_reference"] = "asymptotic (2/pi^2)(ln(2 pi L) + gamma + 1 - pi^2/8)";
  return out.finish();
}

std::vector<fs::path> write_outputs(const ExperimentConfig& config, const PhaseGridResult& result, bool binary) {
  OutputSet out(config);
  if (binary) {
    out.binary("phase_grid.bin", [&](std::ostream& os) {
      io::write_phase_grid_binary(os, result.grid, {{"manifest", kManifestName}});
    });
  } else {
    out.csv("phase_grid.csv", [&](std::ostream& os, const std::string& m) { io::write_phase_grid_csv(os, result.grid, m); });
  }
  out.csv("bare.csv", [&](std::ostream& os, const std::string& m) { io::write_resonance_table(os, result.spectrum, m); });
  out.manifest()["model"] = kFiniteEnergyModel;
  out.manifest()["masked_cells"] = result.grid.masked_count();
  out.manifest()["threshold_poles"] = result.poles;
  out.manifest()["realization_seed"] = result.seed;
  return out.finish();
}

std::vector<fs::path> write_ensemble(const ExperimentConfig& config) {
  config.validate();
  OutputSet out(config);
  const bool with_mu = config.kind == ExperimentKind::phase_grid;
  for (std::size_t k = 0; k < config.ensemble.realization_count; ++k) {
    const auto realization = with_mu ? generate_realization(config.ensemble, k, config.phase_grid.delta_mu_lo,
                                                            config.phase_grid.delta_mu_hi)
                                     : generate_realization(config.ensemble, k);
    std::ostringstream name;
    name << "realization_" << k << ".csv";
    out.csv(name.str(), [&](std::ostream& os, const std::string& m) {
      io::write_resonance_table(os, realization.spectrum, m);
    });
  }
  out.manifest()["b_max"] = config.ensemble.b_max;
  return out.finish();
}

}  // namespace reschaos
