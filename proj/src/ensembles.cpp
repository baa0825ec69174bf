#include "reschaos/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "reschaos/error.hpp"

namespace reschaos {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

enum Stream : std::uint64_t { positions_stream = 0, widths_stream = 1, delta_mu_stream = 2 };

// Maps cumulative spacings onto [d/2, b_max - d/2] so the mean spacing is b_max / n.
std::vector<double> positions_from_spacings(const std::vector<double>& spacings, double b_max) {
  const std::size_t n = spacings.size() + 1;
  const double d = b_max / static_cast<double>(n);
  double total = 0.0;
  for (double s : spacings) total += s;
  const double scale = (b_max - d) / total;
  std::vector<double> pos(n);
  pos[0] = 0.5 * d;
  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    acc += spacings[i - 1];
    pos[i] = 0.5 * d + acc * scale;
  }
  pos[n - 1] = b_max - 0.5 * d;
  return pos;
}

void require_count(std::size_t n, std::size_t minimum, const char* what) {
  if (n < minimum) {
    throw Error(ErrorKind::invalid_argument,
                std::string(what) + " requires at least " + std::to_string(minimum) + " points");
  }
}

void require_range(double b_max) {
  if (!(b_max > 0.0) || !std::isfinite(b_max)) {
    throw Error(ErrorKind::invalid_range, "b_max must be positive");
  }
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform_open_zero() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::exponential(double rate) { return -std::log(uniform_open_zero()) / rate; }

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(master_seed + (index + 1) * kGolden);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed ^ mix64(stream + kGolden));
}

std::string_view to_string(EnsembleKind kind) noexcept {
  switch (kind) {
    case EnsembleKind::poisson: return "poisson";
    case EnsembleKind::wigner_dyson: return "wigner_dyson";
    case EnsembleKind::semi_poisson: return "semi_poisson";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from_string(std::string_view name) {
  if (name == "poisson") return EnsembleKind::poisson;
  if (name == "wigner_dyson") return EnsembleKind::wigner_dyson;
  if (name == "semi_poisson") return EnsembleKind::semi_poisson;
  throw Error(ErrorKind::config_error, "unknown ensemble kind '" + std::string(name) + "'");
}

void EnsembleConfig::validate() const {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "ensemble needs n >= 1");
  if (kind != EnsembleKind::poisson && n < 2) {
    throw Error(ErrorKind::invalid_argument, "correlated ensembles need n >= 2");
  }
  require_range(b_max);
  if (realization_count < 1) throw Error(ErrorKind::invalid_argument, "realization_count must be >= 1");
  std::visit(
      [&](const auto& rule) {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, EqualWidths>) {
          if (!(rule.delta > 0.0)) throw Error(ErrorKind::invalid_range, "equal width must be positive");
        } else if constexpr (std::is_same_v<T, LogUniformWidths>) {
          if (!(rule.delta_min > 0.0) || !(rule.delta_max >= rule.delta_min)) {
            throw Error(ErrorKind::invalid_range, "log-uniform widths need 0 < min <= max");
          }
        } else {
          if (rule.values.size() != n) {
            throw Error(ErrorKind::length_mismatch, "explicit width list must have n entries");
          }
        }
      },
      widths);
}

std::vector<double> sample_poisson_positions(std::size_t n, double b_max, std::uint64_t seed) {
  require_range(b_max);
  Rng rng(seed);
  std::vector<double> pos(n);
  for (auto& x : pos) x = rng.uniform(0.0, b_max);
  std::sort(pos.begin(), pos.end());
  // Ties have probability ~2^-53 per pair; redraw until strictly increasing.
  for (;;) {
    auto dup = std::adjacent_find(pos.begin(), pos.end());
    if (dup == pos.end()) break;
    *dup = rng.uniform(0.0, b_max);
    std::sort(pos.begin(), pos.end());
  }
  return pos;
}

double wd_spacing_from_uniform(double u) noexcept {
  return 2.0 * std::sqrt(std::log(1.0 / u) / std::numbers::pi);
}

std::vector<double> sample_wd_spacings(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(count);
  for (auto& x : s) {
    do {
      x = wd_spacing_from_uniform(rng.uniform_open_zero());
    } while (x == 0.0);
  }
  return s;
}

std::vector<double> sample_semi_poisson_spacings(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(count);
  for (auto& x : s) x = rng.exponential(2.0) + rng.exponential(2.0);
  return s;
}

std::vector<double> sample_exponential_spacings(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(count);
  for (auto& x : s) x = rng.exponential(1.0);
  return s;
}

std::vector<double> sample_brody_spacings(double eta, std::size_t count, std::uint64_t seed) {
  if (!(eta >= 0.0)) throw Error(ErrorKind::invalid_argument, "Brody eta must be >= 0");
  const double alpha = std::pow(std::tgamma((eta + 2.0) / (eta + 1.0)), eta + 1.0);
  Rng rng(seed);
  std::vector<double> s(count);
  for (auto& x : s) x = std::pow(-std::log(rng.uniform_open_zero()) / alpha, 1.0 / (eta + 1.0));
  return s;
}

std::vector<double> sample_wd_positions(std::size_t n, double b_max, std::uint64_t seed) {
  require_count(n, 2, "Wigner-Dyson positions");
  require_range(b_max);
  return positions_from_spacings(sample_wd_spacings(n - 1, seed), b_max);
}

std::vector<double> sample_semi_poisson_positions(std::size_t n, double b_max, std::uint64_t seed) {
  require_count(n, 2, "semi-Poisson positions");
  require_range(b_max);
  return positions_from_spacings(sample_semi_poisson_spacings(n - 1, seed), b_max);
}

std::vector<double> assign_widths(const WidthRule& rule, std::size_t n, std::uint64_t seed) {
  return std::visit(
      [&](const auto& r) -> std::vector<double> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, EqualWidths>) {
          if (!(r.delta > 0.0)) throw Error(ErrorKind::invalid_range, "equal width must be positive");
          return std::vector<double>(n, r.delta);
        } else if constexpr (std::is_same_v<T, LogUniformWidths>) {
          if (!(r.delta_min > 0.0) || !(r.delta_max >= r.delta_min)) {
            throw Error(ErrorKind::invalid_range, "log-uniform widths need 0 < min <= max");
          }
          Rng rng(seed);
          const double lo = std::log(r.delta_min);
          const double hi = std::log(r.delta_max);
          std::vector<double> w(n);
          for (auto& x : w) x = (lo == hi) ? r.delta_min : std::exp(rng.uniform(lo, hi));
          return w;
        } else {
          if (r.values.size() != n) {
            throw Error(ErrorKind::length_mismatch, "explicit width list must have n entries");
          }
          return r.values;
        }
      },
      rule);
}

std::vector<double> sample_delta_mu(std::size_t n, double lo, double hi, std::uint64_t seed) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::invalid_range, "delta_mu range needs 0 <= lo < hi");
  }
  Rng rng(seed);
  std::vector<double> mu(n);
  for (auto& x : mu) x = std::max(rng.uniform(lo, hi), kDeltaMuFloor);
  return mu;
}

namespace {

std::vector<double> sample_positions(const EnsembleConfig& config, std::uint64_t seed) {
  switch (config.kind) {
    case EnsembleKind::poisson: return sample_poisson_positions(config.n, config.b_max, seed);
    case EnsembleKind::wigner_dyson: return sample_wd_positions(config.n, config.b_max, seed);
    case EnsembleKind::semi_poisson: return sample_semi_poisson_positions(config.n, config.b_max, seed);
  }
  throw Error(ErrorKind::config_error, "unknown ensemble kind");
}

}  // namespace

Realization generate_realization(const EnsembleConfig& config, std::size_t index) {
  config.validate();
  const auto seed = realization_seed(config.master_seed, index);
  auto positions = sample_positions(config, stream_seed(seed, positions_stream));
  auto widths = assign_widths(config.widths, config.n, stream_seed(seed, widths_stream));
  return Realization{index, seed, BareSpectrum(config.b_max, std::move(positions), std::move(widths))};
}

Realization generate_realization(const EnsembleConfig& config, std::size_t index, double delta_mu_lo,
                                 double delta_mu_hi) {
  config.validate();
  const auto seed = realization_seed(config.master_seed, index);
  auto positions = sample_positions(config, stream_seed(seed, positions_stream));
  auto widths = assign_widths(config.widths, config.n, stream_seed(seed, widths_stream));
  auto mu = sample_delta_mu(config.n, delta_mu_lo, delta_mu_hi, stream_seed(seed, delta_mu_stream));
  return Realization{index, seed,
                     BareSpectrum(config.b_max, std::move(positions), std::move(widths), std::move(mu))};
}

}  // namespace reschaos
