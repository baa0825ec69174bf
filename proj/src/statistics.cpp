#include "reschaos/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "reschaos/error.hpp"

namespace reschaos {

namespace {

constexpr double kInvPhi = 0.61803398874989484820;  // (sqrt(5) - 1) / 2

void require_positive_spacings(std::span<const double> spacings) {
  for (double s : spacings) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorKind::invalid_argument, "spacings must be positive and finite");
    }
  }
}

double histogram_residual(std::span<const double> spacings, double eta, const FitOptions& options) {
  const auto bins = static_cast<std::size_t>(std::ceil(options.s_max / options.bin_width - 1e-9));
  std::vector<std::size_t> counts(bins, 0);
  for (double s : spacings) {
    if (s >= 0.0 && s < static_cast<double>(bins) * options.bin_width) {
      counts[std::min(bins - 1, static_cast<std::size_t>(s / options.bin_width))] += 1;
    }
  }
  const double norm = 1.0 / (static_cast<double>(spacings.size()) * options.bin_width);
  const BrodyLaw law{eta};
  double sum = 0.0;
  double cdf_lo = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double cdf_hi = reference_cdf(law, static_cast<double>(b + 1) * options.bin_width);
    const double model = (cdf_hi - cdf_lo) / options.bin_width;
    const double r = static_cast<double>(counts[b]) * norm - model;
    sum += r * r;
    cdf_lo = cdf_hi;
  }
  return sum;
}

}  // namespace

SpacingSample unfold_spacings(std::span<const double> positions) {
  if (positions.size() < 2) throw Error(ErrorKind::too_few_points, "need at least two positions");
  SpacingSample out;
  out.spacings.resize(positions.size() - 1);
  double total = 0.0;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    out.spacings[i - 1] = positions[i] - positions[i - 1];
    total += out.spacings[i - 1];
  }
  const double mean = total / static_cast<double>(out.spacings.size());
  if (!(mean > 0.0)) throw Error(ErrorKind::invalid_argument, "positions must be increasing");
  for (double& s : out.spacings) s /= mean;
  return out;
}

std::vector<double> unfold_positions(std::span<const double> positions) {
  if (positions.size() < 2) throw Error(ErrorKind::too_few_points, "need at least two positions");
  const double mean =
      (positions.back() - positions.front()) / static_cast<double>(positions.size() - 1);
  if (!(mean > 0.0)) throw Error(ErrorKind::invalid_argument, "positions must be increasing");
  std::vector<double> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) out[i] = (positions[i] - positions.front()) / mean;
  return out;
}

std::vector<double> restrict_to_window(std::span<const double> positions, double lo, double hi) {
  std::vector<double> out;
  for (double x : positions) {
    if (x >= lo && x <= hi) out.push_back(x);
  }
  return out;
}

double brody_alpha(double eta) { return std::pow(std::tgamma((eta + 2.0) / (eta + 1.0)), eta + 1.0); }

double reference_pdf(const SpacingLaw& law, double s) {
  if (s < 0.0) return 0.0;
  return std::visit(
      [s](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, PoissonLaw>) {
          return std::exp(-s);
        } else if constexpr (std::is_same_v<T, WignerDysonLaw>) {
          return 0.5 * std::numbers::pi * s * std::exp(-0.25 * std::numbers::pi * s * s);
        } else if constexpr (std::is_same_v<T, SemiPoissonLaw>) {
          return 4.0 * s * std::exp(-2.0 * s);
        } else {
          const double a = brody_alpha(l.eta);
          return a * (l.eta + 1.0) * std::pow(s, l.eta) * std::exp(-a * std::pow(s, l.eta + 1.0));
        }
      },
      law);
}

double reference_cdf(const SpacingLaw& law, double s) {
  if (s <= 0.0) return 0.0;
  return std::visit(
      [s](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, PoissonLaw>) {
          return -std::expm1(-s);
        } else if constexpr (std::is_same_v<T, WignerDysonLaw>) {
          return -std::expm1(-0.25 * std::numbers::pi * s * s);
        } else if constexpr (std::is_same_v<T, SemiPoissonLaw>) {
          return 1.0 - (1.0 + 2.0 * s) * std::exp(-2.0 * s);
        } else {
          return -std::expm1(-brody_alpha(l.eta) * std::pow(s, l.eta + 1.0));
        }
      },
      law);
}

std::string_view to_string(FitMethod method) noexcept {
  return method == FitMethod::histogram ? "histogram" : "maximum_likelihood";
}

FitMethod fit_method_from_string(std::string_view name) {
  if (name == "histogram") return FitMethod::histogram;
  if (name == "maximum_likelihood" || name == "mle") return FitMethod::maximum_likelihood;
  throw Error(ErrorKind::config_error, "unknown fit method '" + std::string(name) + "'");
}

double brody_log_likelihood(std::span<const double> spacings, double eta) {
  const double a = brody_alpha(eta);
  const double log_norm = std::log(a * (eta + 1.0));
  double sum = 0.0;
  for (double s : spacings) {
    const double ls = std::log(s);
    sum += log_norm + eta * ls - a * std::exp((eta + 1.0) * ls);
  }
  return sum;
}

double brody_fit_objective(std::span<const double> spacings, double eta, const FitOptions& options) {
  if (options.method == FitMethod::maximum_likelihood) return -brody_log_likelihood(spacings, eta);
  return histogram_residual(spacings, eta, options);
}

BrodyFit fit_brody(const SpacingSample& sample, const FitOptions& options) {
  const auto& s = sample.spacings;
  if (s.size() < 10) {
    throw Error(ErrorKind::too_few_points,
                "Brody fit needs at least 10 spacings, got " + std::to_string(s.size()));
  }
  require_positive_spacings(s);
  if (!(options.bin_width > 0.0) || !(options.s_max > options.bin_width)) {
    throw Error(ErrorKind::invalid_argument, "histogram needs 0 < bin_width < s_max");
  }
  auto objective = [&](double eta) { return brody_fit_objective(s, eta, options); };

  // Coarse scan: bracket the global minimum and count slope reversals.
  const int m = std::max(options.scan_points, 5) - 1;
  std::vector<double> grid(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) grid[static_cast<std::size_t>(i)] = objective(static_cast<double>(i) / m);
  const auto best = static_cast<int>(std::min_element(grid.begin(), grid.end()) - grid.begin());
  int sign_changes = 0;
  int last_sign = 0;
  for (int i = 0; i < m; ++i) {
    const double diff = grid[static_cast<std::size_t>(i) + 1] - grid[static_cast<std::size_t>(i)];
    const int sign = (diff > 0.0) - (diff < 0.0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++sign_changes;
    last_sign = sign;
  }

  double lo = static_cast<double>(std::max(best - 1, 0)) / m;
  double hi = static_cast<double>(std::min(best + 1, m)) / m;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > options.eta_tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = objective(x2);
    }
  }
  double eta = 0.5 * (lo + hi);
  double value = objective(eta);
  // The optimum may sit on a boundary of [0, 1].
  for (double edge : {0.0, 1.0}) {
    const double fe = objective(edge);
    if (fe < value) {
      value = fe;
      eta = edge;
    }
  }

  BrodyFit fit;
  fit.eta = std::clamp(eta, 0.0, 1.0);
  fit.objective = value;
  fit.log_likelihood = brody_log_likelihood(s, fit.eta);
  fit.n_samples = s.size();
  fit.converged = sign_changes <= 1 && std::isfinite(value);
  fit.at_boundary = fit.eta < 1e-4 || fit.eta > 1.0 - 1e-4;
  fit.method = options.method;
  return fit;
}

EtaSummary mean_eta_over_realizations(std::span<const BrodyFit> fits) {
  if (fits.size() < 2) throw Error(ErrorKind::too_few_points, "need at least two realizations");
  for (std::size_t i = 0; i < fits.size(); ++i) {
    if (!fits[i].converged) {
      throw Error(ErrorKind::fit_failure, "Brody fit of realization " + std::to_string(i) +
                                              " did not converge");
    }
  }
  EtaSummary out;
  out.count = fits.size();
  double sum = 0.0;
  for (const auto& f : fits) sum += f.eta;
  out.mean = sum / static_cast<double>(fits.size());
  double ss = 0.0;
  for (const auto& f : fits) ss += (f.eta - out.mean) * (f.eta - out.mean);
  out.std_dev = std::sqrt(ss / static_cast<double>(fits.size() - 1));
  return out;
}

NumberVarianceCurve number_variance(std::span<const double> positions, std::span<const double> lengths,
                                    double stride) {
  if (positions.size() < 2) throw Error(ErrorKind::too_few_points, "need at least two positions");
  if (!(stride > 0.0)) throw Error(ErrorKind::invalid_argument, "stride must be positive");
  const double first = positions.front();
  const double last = positions.back();
  const double span = last - first;

  NumberVarianceCurve curve;
  for (double L : lengths) {
    if (!(L > 0.0)) throw Error(ErrorKind::invalid_argument, "window length must be positive");
    if (L > 0.25 * span) {
      throw Error(ErrorKind::window_too_large,
                  "L = " + std::to_string(L) + " exceeds a quarter of the span " + std::to_string(span));
    }
    if (!curve.lengths.empty() && !(L > curve.lengths.back())) {
      throw Error(ErrorKind::invalid_argument, "window lengths must be increasing");
    }
    const double start = first + L;
    const double stop = last - 2.0 * L;
    const auto windows = static_cast<std::size_t>(std::floor((stop - start) / stride + 1e-9)) + 1;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t w = 0; w < windows; ++w) {
      const double b0 = start + static_cast<double>(w) * stride;
      const auto lo = std::lower_bound(positions.begin(), positions.end(), b0);
      const auto hi = std::lower_bound(lo, positions.end(), b0 + L);
      const auto count = static_cast<double>(hi - lo);
      sum += count;
      sum_sq += count * count;
    }
    const double mean = sum / static_cast<double>(windows);
    curve.lengths.push_back(L);
    curve.sigma2.push_back(std::max(0.0, sum_sq / static_cast<double>(windows) - mean * mean));
    curve.window_count.push_back(windows);
  }
  return curve;
}

std::string_view to_string(Sigma2Reference kind) noexcept {
  switch (kind) {
    case Sigma2Reference::poisson: return "poisson";
    case Sigma2Reference::semi_poisson: return "semi_poisson";
    case Sigma2Reference::goe: return "goe";
  }
  return "unknown";
}

double reference_sigma2(Sigma2Reference kind, double length) {
  if (!(length > 0.0)) throw Error(ErrorKind::invalid_argument, "window length must be positive");
  switch (kind) {
    case Sigma2Reference::poisson: return length;
    case Sigma2Reference::semi_poisson: return 0.5 * length - std::expm1(-4.0 * length) / 8.0;
    case Sigma2Reference::goe: {
      constexpr double pi = std::numbers::pi;
      return 2.0 / (pi * pi) * (std::log(2.0 * pi * length) + kEulerGamma + 1.0 - pi * pi / 8.0);
    }
  }
  return 0.0;
}

std::vector<HistogramBin> spacing_histogram(std::span<const double> spacings, double bin_width,
                                            double s_max) {
  if (!(bin_width > 0.0) || !(s_max > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "histogram needs positive bin width and range");
  }
  const auto bins = static_cast<std::size_t>(std::ceil(s_max / bin_width - 1e-9));
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = static_cast<double>(b) * bin_width;
    out[b].hi = static_cast<double>(b + 1) * bin_width;
  }
  for (double s : spacings) {
    if (s >= 0.0 && s < out.back().hi) out[std::min(bins - 1, static_cast<std::size_t>(s / bin_width))].count++;
  }
  const double norm = spacings.empty() ? 0.0 : 1.0 / (static_cast<double>(spacings.size()) * bin_width);
  for (auto& b : out) b.density = static_cast<double>(b.count) * norm;
  return out;
}

}  // namespace reschaos
