// Command-line front end: one subcommand per experiment.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "reschaos/error.hpp"
#include "reschaos/experiments.hpp"

namespace {

using namespace reschaos;

enum ExitCode { ok = 0, config_failure = 2, numerical_failure = 3, io_failure = 4 };

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON); defaults are used when omitted");
  cmd->add_option("--seed", opts.seed, "master seed (overrides RESCHAOS_SEED and the config)");
  cmd->add_option("--out", opts.out_dir, "output directory (overrides the config)");
  cmd->add_option("--workers", opts.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--format", opts.format, "phase-grid format")->check(CLI::IsMember({"csv", "binary"}));
}

// `kind` is the experiment the subcommand runs; nullopt accepts any config.
ExperimentConfig resolve_config(const CommonOptions& opts, std::optional<ExperimentKind> kind,
                                ExperimentKind fallback) {
  ExperimentConfig config =
      opts.config_path.empty() ? default_config(kind.value_or(fallback)) : load_config(opts.config_path);
  if (kind && config.kind != *kind) {
    throw Error(ErrorKind::config_error, "config describes a " + std::string(to_string(config.kind)) +
                                             " experiment, not " + std::string(to_string(*kind)));
  }
  if (const char* env = std::getenv("RESCHAOS_SEED")) {
    try {
      config.ensemble.master_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::config_error, std::string("RESCHAOS_SEED is not an unsigned integer: ") + env);
    }
  }
  if (opts.seed) config.ensemble.master_seed = *opts.seed;
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  config.validate();
  return config;
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

int run(const std::string& command, const CommonOptions& opts) {
  if (command == "brody-sweep") {
    const auto config = resolve_config(opts, ExperimentKind::brody_sweep, ExperimentKind::brody_sweep);
    const auto result = run_brody_sweep(config, opts.workers);
    for (const auto& row : result.rows) {
      std::cout << "width " << row.width << "  eta " << row.summary.mean << " +- " << row.summary.std_dev << '\n';
    }
    report(write_outputs(config, result));
  } else if (command == "scan-a") {
    const auto config = resolve_config(opts, ExperimentKind::a_scan, ExperimentKind::a_scan);
    const auto result = run_a_scan(config);
    std::cout << "poles " << result.poles_in_range << ", zeros " << result.zeros_in_range << ", median |a| "
              << result.median_abs_a << '\n';
    report(write_outputs(config, result));
  } else if (command == "spacings") {
    const auto config = resolve_config(opts, ExperimentKind::spacing_hist, ExperimentKind::spacing_hist);
    const auto result = run_spacing_hist(config, opts.workers);
    std::cout << "pooled eta " << result.pooled_fit.eta << " from " << result.pooled_fit.n_samples << " spacings\n";
    report(write_outputs(config, result));
  } else if (command == "number-variance") {
    const auto config = resolve_config(opts, ExperimentKind::number_variance, ExperimentKind::number_variance);
    report(write_outputs(config, run_number_variance(config, opts.workers)));
  } else if (command == "phase-grid") {
    const auto config = resolve_config(opts, ExperimentKind::phase_grid, ExperimentKind::phase_grid);
    const auto result = run_phase_grid(config, opts.workers);
    std::cout << "grid " << result.grid.rows() << " x " << result.grid.cols() << ", masked "
              << result.grid.masked_count() << '\n';
    report(write_outputs(config, result, opts.format == "binary"));
  } else if (command == "gen-ensemble") {
    const auto config = resolve_config(opts, std::nullopt, ExperimentKind::a_scan);
    report(write_ensemble(config));
  } else if (command == "validate") {
    const auto config = resolve_config(opts, std::nullopt, ExperimentKind::brody_sweep);
    bool all = true;
    for (const auto& check : validate_config(config, opts.workers)) {
      std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
      all = all && check.passed;
    }
    return all ? ok : numerical_failure;
  }
  return ok;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config_error:
    case ErrorKind::invalid_argument:
    case ErrorKind::invalid_range:
    case ErrorKind::length_mismatch:
    case ErrorKind::missing_delta_mu:
      return config_failure;
    case ErrorKind::io_error:
      return io_failure;
    default:
      return numerical_failure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlapping Feshbach resonance simulator and spectral statistics"};
  app.require_subcommand(1);
  CommonOptions opts;
  const std::pair<const char*, const char*> commands[] = {
      {"gen-ensemble", "write bare resonance tables for every realization"},
      {"scan-a", "scattering length a(B) trace with dressed positions and widths"},
      {"spacings", "unfolded spacings, histogram and pooled Brody fit"},
      {"brody-sweep", "mean Brody parameter versus resonance width"},
      {"number-variance", "number variance curves with Poisson / semi-Poisson / GOE references"},
      {"phase-grid", "sin^2(delta) over (E, B)"},
      {"validate", "run the solver invariant suite on a config"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : config_failure;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return numerical_failure;
  }
}
