#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "reschaos/error.hpp"
#include "reschaos/experiments.hpp"

namespace reschaos {

namespace {

struct Tally {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst = 0.0;
  std::string first_failure;

  void record(bool ok, double metric, const std::string& where) {
    ++checked;
    worst = std::max(worst, metric);
    if (!ok) {
      if (failed == 0) first_failure = where;
      ++failed;
    }
  }

  void merge(const Tally& other) {
    checked += other.checked;
    if (failed == 0 && other.failed > 0) first_failure = other.first_failure;
    failed += other.failed;
    worst = std::max(worst, other.worst);
  }
};

enum CheckIndex { interlacing, residuals, sum_rule, sum_product, denominator, check_count };

constexpr const char* kCheckNames[check_count] = {
    "interlacing", "root residuals (< 1e-9 or at the floating-point floor)", "sum rule (sum of effective widths)",
    "sum/product form agreement (rel 1e-8)", "denominator factorisation (rel 1e-10)"};

void check_spectrum(const BareSpectrum& spectrum, const Background& bg, std::uint64_t seed,
                    const std::string& tag, std::array<Tally, check_count>& tallies) {
  const double d = spectrum.mean_spacing();
  SolverOptions options;
  options.tol = 1e-12 * d;
  const auto shifts = shift_table(spectrum, bg);
  const auto pos = spectrum.positions();
  const auto result = dress(spectrum, bg, options);
  const auto& dressed = result.dressed;

  bool positive = true;
  for (double s : shifts) positive = positive && s > 0.0;
  if (positive) {
    const double total = std::accumulate(shifts.begin(), shifts.end(), 0.0);
    bool ok = dressed.positions_res.size() == pos.size();
    for (std::size_t i = 0; ok && i < pos.size(); ++i) {
      const double upper = i + 1 < pos.size() ? pos[i + 1] : pos[i] + total;
      const double x = dressed.positions_res[i];
      ok = x > pos[i] && (i + 1 < pos.size() ? x < upper : x <= upper);
    }
    tallies[interlacing].record(ok, 0.0, tag);

    double worst = 0.0;
    bool converged = true;
    for (double x : dressed.positions_res) {
      worst = std::max(worst, std::abs(secular_value(x, shifts, pos)));
      converged = converged && root_converged(x, shifts, pos);
    }
    tallies[residuals].record(converged, worst, tag);
  }

  const double w_sum = std::accumulate(spectrum.widths().begin(), spectrum.widths().end(), 0.0);
  const double w_eff = std::accumulate(dressed.widths_eff.begin(), dressed.widths_eff.end(), 0.0);
  const double rel = std::abs(w_eff - w_sum) / std::abs(w_sum);
  tallies[sum_rule].record(rel < 1e-9, rel, tag);

  Rng rng(stream_seed(seed, 3));
  const double lo = pos.front() - d;
  const double hi = pos.back() + 2.0 * (w_sum + std::accumulate(shifts.begin(), shifts.end(), 0.0)) + d;
  const PoleGuard guard = PoleGuard::for_spectrum(spectrum);
  double worst_sp = 0.0;
  double worst_den = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double b = rng.uniform(lo, hi);
    try {
      const double a_sum = scattering_length(b, spectrum, bg, guard);
      const double a_prod = product_form_value(b, dressed, bg, guard);
      const double scale = std::max(std::abs(a_sum), std::abs(bg.a_bg()));
      worst_sp = std::max(worst_sp, std::abs(a_sum - a_prod) / scale);

      const double f = secular_value(b, shifts, pos, guard);
      double magnitude = 1.0;
      for (std::size_t j = 0; j < pos.size(); ++j) magnitude += std::abs(shifts[j] / (b - pos[j]));
      for (std::size_t i = 0; i < pos.size(); ++i) {
        const double direct = local_denominator(i, b, spectrum, shifts);
        const double factored = (b - pos[i]) * f;
        worst_den = std::max(worst_den, std::abs(direct - factored) / (std::abs(b - pos[i]) * magnitude));
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::pole_proximity) throw;
    }
  }
  tallies[sum_product].record(worst_sp < 1e-8, worst_sp, tag);
  tallies[denominator].record(worst_den < 1e-10, worst_den, tag);
}

}  // namespace

std::vector<ValidationCheck> validate_config(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const Background bg = config.background.make();
  std::vector<EnsembleConfig> ensembles;
  if (config.widths.empty()) {
    ensembles.push_back(config.ensemble);
  } else {
    for (double w : config.widths) ensembles.push_back(with_equal_widths(config.ensemble, w));
  }
  const std::size_t reps = config.ensemble.realization_count;
  const std::size_t jobs = ensembles.size() * reps;
  std::vector<std::array<Tally, check_count>> per_job(jobs);
  detail::parallel_for(jobs, workers, [&](std::size_t job) {
    const auto& ensemble = ensembles[job / reps];
    const std::size_t k = job % reps;
    const auto realization = generate_realization(ensemble, k);
    const std::string tag = "width #" + std::to_string(job / reps) + ", realization " + std::to_string(k);
    check_spectrum(realization.spectrum, bg, realization.seed, tag, per_job[job]);
  });

  std::array<Tally, check_count> total{};
  for (const auto& t : per_job) {
    for (std::size_t c = 0; c < check_count; ++c) total[c].merge(t[c]);
  }
  std::vector<ValidationCheck> checks;
  for (std::size_t c = 0; c < check_count; ++c) {
    ValidationCheck check;
    check.name = kCheckNames[c];
    check.passed = total[c].failed == 0;
    check.detail = std::to_string(total[c].checked - total[c].failed) + "/" + std::to_string(total[c].checked) +
                   " spectra ok, worst metric " + std::to_string(total[c].worst);
    if (total[c].failed > 0) check.detail += ", first failure: " + total[c].first_failure;
    if (total[c].checked == 0) check.detail = "not applicable (non-positive shifts)";
    checks.push_back(std::move(check));
  }
  return checks;
}

}  // namespace reschaos
