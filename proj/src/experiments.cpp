#include "reschaos/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "reschaos/error.hpp"

namespace reschaos {

namespace {

double median_of(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_trace, "trace has no unmasked points");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::size_t count_in(std::span<const double> xs, double lo, double hi) {
  return static_cast<std::size_t>(
      std::count_if(xs.begin(), xs.end(), [&](double x) { return x >= lo && x <= hi; }));
}

}  // namespace

EnsembleConfig with_equal_widths(const EnsembleConfig& ensemble, double width_in_d) {
  EnsembleConfig out = ensemble;
  out.widths = EqualWidths{width_in_d * ensemble.b_max / static_cast<double>(ensemble.n)};
  return out;
}

std::vector<double> observed_positions(const BareSpectrum& spectrum, const Background& bg) {
  SolverOptions options;
  options.tol = 1e-12 * spectrum.mean_spacing();
  const auto positions = find_resonance_positions(spectrum, bg, options);
  return restrict_to_window(positions, 0.0, spectrum.b_max());
}

BrodySweepResult run_brody_sweep(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const Background bg = config.background.make();
  const std::size_t reps = config.ensemble.realization_count;
  BrodySweepResult result;

  for (double width : config.widths) {
    const auto ensemble = with_equal_widths(config.ensemble, width);
    std::vector<RealizationFit> fits(reps);
    std::vector<std::vector<double>> spacings(reps);
    detail::parallel_for(reps, workers, [&](std::size_t k) {
      RealizationFit& out = fits[k];
      out.width = width;
      out.realization = k;
      out.seed = realization_seed(ensemble.master_seed, k);
      try {
        const auto realization = generate_realization(ensemble, k);
        auto sample = unfold_spacings(observed_positions(realization.spectrum, bg));
        sample.realization = k;
        out.fit = fit_brody(sample, config.fit);
        if (!out.fit.converged) {
          out.failed = true;
          out.error = "Brody objective not unimodal";
        }
        spacings[k] = std::move(sample.spacings);
      } catch (const Error& e) {
        out.failed = true;
        out.error = e.what();
      }
    });

    BrodySweepRow row;
    row.width = width;
    std::vector<BrodyFit> good;
    for (const auto& f : fits) {
      if (f.failed) {
        ++row.failures;
      } else {
        good.push_back(f.fit);
      }
    }
    if (static_cast<double>(row.failures) > 0.1 * static_cast<double>(reps)) {
      std::string first_error;
      for (const auto& f : fits) {
        if (f.failed) {
          first_error = "realization " + std::to_string(f.realization) + ": " + f.error;
          break;
        }
      }
      throw Error(ErrorKind::fit_failure, std::to_string(row.failures) + " of " + std::to_string(reps) +
                                              " realizations failed at width " + std::to_string(width) +
                                              " (" + first_error + ")");
    }
    row.summary = mean_eta_over_realizations(good);
    if (config.pooled_fit) {
      SpacingSample pooled;
      pooled.source = "pooled";
      for (std::size_t k = 0; k < reps; ++k) {
        if (!fits[k].failed) pooled.spacings.insert(pooled.spacings.end(), spacings[k].begin(), spacings[k].end());
      }
      row.pooled = fit_brody(pooled, config.fit);
    }
    result.rows.push_back(row);
    result.fits.insert(result.fits.end(), fits.begin(), fits.end());
  }
  return result;
}

ScanTrace scan_scattering_length(const BareSpectrum& spectrum, const Background& bg, double b_lo,
                                 double b_hi, std::size_t points) {
  if (points < 2 || !(b_hi > b_lo)) throw Error(ErrorKind::invalid_argument, "scan needs >= 2 points on a nonempty range");
  const PoleGuard guard = PoleGuard::for_spectrum(spectrum);
  ScanTrace trace;
  trace.b.resize(points);
  trace.a.resize(points);
  trace.masked.assign(points, 0);
  const double step = (b_hi - b_lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double b = b_lo + step * static_cast<double>(i);
    trace.b[i] = b;
    try {
      trace.a[i] = scattering_length(b, spectrum, bg, guard);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::pole_proximity) throw;
      trace.a[i] = std::numeric_limits<double>::quiet_NaN();
      trace.masked[i] = 1;
    }
  }
  return trace;
}

double median_scattering_length(const ScanTrace& trace) {
  std::vector<double> values;
  for (std::size_t i = 0; i < trace.a.size(); ++i) {
    if (trace.masked[i] == 0) values.push_back(trace.a[i]);
  }
  return median_of(std::move(values));
}

double median_abs_scattering_length(const ScanTrace& trace) {
  std::vector<double> values;
  for (std::size_t i = 0; i < trace.a.size(); ++i) {
    if (trace.masked[i] == 0) values.push_back(std::abs(trace.a[i]));
  }
  return median_of(std::move(values));
}

AScanResult run_a_scan(const ExperimentConfig& config) {
  config.validate();
  const Background bg = config.background.make();
  auto realization = generate_realization(config.ensemble, config.scan.realization);
  const BareSpectrum& spectrum = realization.spectrum;
  const double d = spectrum.mean_spacing();

  SolverOptions options;
  options.tol = 1e-12 * d;
  const auto dressed = dress(spectrum, bg, options);
  std::vector<double> zeros(dressed.dressed.positions_res.size());
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    zeros[i] = dressed.dressed.positions_res[i] + dressed.dressed.widths_eff[i];
  }

  double lo = std::min(0.0, spectrum.positions().front()) - d;
  double hi = spectrum.b_max() + d;
  if (!zeros.empty()) hi = std::max(hi, zeros.back() + d);
  if (!dressed.dressed.positions_res.empty()) hi = std::max(hi, dressed.dressed.positions_res.back() + d);
  if (config.scan.b_lo) lo = *config.scan.b_lo;
  if (config.scan.b_hi) hi = *config.scan.b_hi;
  const auto points = static_cast<std::size_t>(std::ceil((hi - lo) / d * config.scan.points_per_spacing)) + 1;

  AScanResult result{scan_scattering_length(spectrum, bg, lo, hi, points), spectrum, dressed.dressed, zeros};
  result.seed = realization.seed;
  result.poles_in_range = count_in(result.dressed.positions_res, lo, hi);
  result.zeros_in_range = count_in(result.zeros, lo, hi);
  const auto& t = result.trace;
  std::ptrdiff_t prev = -1;
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    if (t.masked[i] != 0) continue;
    if (prev >= 0 && (t.a[i] < 0.0) != (t.a[static_cast<std::size_t>(prev)] < 0.0)) ++result.grid_sign_changes;
    prev = static_cast<std::ptrdiff_t>(i);
  }
  result.median_a = median_scattering_length(t);
  result.median_abs_a = median_abs_scattering_length(t);
  return result;
}

SpacingHistResult run_spacing_hist(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const Background bg = config.background.make();
  const std::size_t reps = config.ensemble.realization_count;
  SpacingHistResult result;
  result.samples.resize(reps);
  detail::parallel_for(reps, workers, [&](std::size_t k) {
    const auto realization = generate_realization(config.ensemble, k);
    result.samples[k] = unfold_spacings(observed_positions(realization.spectrum, bg));
    result.samples[k].realization = k;
  });
  SpacingSample pooled;
  pooled.source = "pooled";
  for (const auto& s : result.samples) pooled.spacings.insert(pooled.spacings.end(), s.spacings.begin(), s.spacings.end());
  result.histogram = spacing_histogram(pooled.spacings, config.fit.bin_width, config.fit.s_max);
  result.pooled_fit = fit_brody(pooled, config.fit);
  return result;
}

NumberVarianceResult run_number_variance(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const Background bg = config.background.make();
  const std::size_t reps = config.ensemble.realization_count;
  const auto& lengths = config.number_variance.lengths;
  NumberVarianceResult result;
  result.lengths = lengths;
  for (double L : lengths) {
    result.poisson.push_back(reference_sigma2(Sigma2Reference::poisson, L));
    result.semi_poisson.push_back(reference_sigma2(Sigma2Reference::semi_poisson, L));
    result.goe.push_back(reference_sigma2(Sigma2Reference::goe, L));
  }

  for (double width : config.widths) {
    const auto ensemble = with_equal_widths(config.ensemble, width);
    std::vector<NumberVarianceCurve> curves(reps);
    detail::parallel_for(reps, workers, [&](std::size_t k) {
      const auto realization = generate_realization(ensemble, k);
      const auto unfolded = unfold_positions(observed_positions(realization.spectrum, bg));
      curves[k] = number_variance(unfolded, lengths, config.number_variance.stride);
    });
    NumberVarianceRow row;
    row.width = width;
    row.lengths = lengths;
    for (std::size_t l = 0; l < lengths.size(); ++l) {
      double sum = 0.0;
      double sum_sq = 0.0;
      std::size_t windows = 0;
      for (const auto& c : curves) {
        sum += c.sigma2[l];
        sum_sq += c.sigma2[l] * c.sigma2[l];
        windows += c.window_count[l];
      }
      const auto n = static_cast<double>(reps);
      const double mean = sum / n;
      const double var = reps > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
      row.sigma2.push_back(mean);
      row.std_error.push_back(std::sqrt(var / n));
      row.window_count.push_back(windows);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

PhaseGridResult run_phase_grid(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const Background bg = config.background.make();
  const auto& pg = config.phase_grid;
  auto realization = generate_realization(config.ensemble, pg.realization, pg.delta_mu_lo, pg.delta_mu_hi);
  const BareSpectrum& spectrum = realization.spectrum;
  const double d = spectrum.mean_spacing();

  const double lo = pg.b_lo.value_or(0.0);
  const double hi = pg.b_hi.value_or(spectrum.b_max());
  const auto b_points = static_cast<std::size_t>(std::ceil((hi - lo) / d * pg.b_points_per_spacing)) + 1;

  PhaseGridSpec spec{{}, {}, spectrum, bg, PoleGuard::for_spectrum(spectrum)};
  spec.e_values.resize(pg.e_points);
  for (std::size_t i = 0; i < pg.e_points; ++i) {
    spec.e_values[i] = pg.e_points == 1 ? pg.e_min
                                        : pg.e_min + (pg.e_max - pg.e_min) * static_cast<double>(i) /
                                                         static_cast<double>(pg.e_points - 1);
  }
  spec.b_values.resize(b_points);
  for (std::size_t i = 0; i < b_points; ++i) {
    spec.b_values[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(b_points - 1);
  }

  SolverOptions options;
  options.tol = 1e-12 * d;
  return PhaseGridResult{sin2_delta_grid(spec, workers), spectrum, find_resonance_positions(spectrum, bg, options),
                         realization.seed};
}

}  // namespace reschaos
