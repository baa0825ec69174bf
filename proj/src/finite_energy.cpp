#include "reschaos/finite_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <numeric>
#include <thread>

#include "reschaos/error.hpp"

namespace reschaos {

ShiftedSpectrum energy_shifted_spectrum(const BareSpectrum& spectrum, double energy) {
  if (!(energy >= 0.0) || !std::isfinite(energy)) {
    throw Error(ErrorKind::invalid_argument, "energy must be finite and non-negative");
  }
  const auto mu = spectrum.delta_mu();
  const auto pos = spectrum.positions();
  const auto widths = spectrum.widths();
  const std::size_t n = spectrum.size();

  std::vector<double> shifted(n);
  for (std::size_t i = 0; i < n; ++i) shifted[i] = pos[i] + energy / mu[i];
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return shifted[a] < shifted[b]; });

  std::vector<double> p(n), w(n), m(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = shifted[perm[i]];
    w[i] = widths[perm[i]];
    m[i] = mu[perm[i]];
  }
  // b_max is a range label only; keep it covering the shifted crossings.
  const double b_max = std::max(spectrum.b_max(), n == 0 ? 0.0 : p.back());
  return ShiftedSpectrum{BareSpectrum(b_max, std::move(p), std::move(w), std::move(m)),
                         std::move(perm)};
}

double wave_number(double energy, const Background& bg) {
  if (!(energy >= 0.0)) throw Error(ErrorKind::invalid_argument, "energy must be non-negative");
  return std::sqrt(energy / bg.ebar()) / bg.abar();
}

double phase_shift(double energy, double b, const BareSpectrum& spectrum, const Background& bg,
                   PoleGuard guard) {
  const double k = wave_number(energy, bg);
  if (k == 0.0) return 0.0;
  const auto shifted = energy_shifted_spectrum(spectrum, energy);
  return -std::atan(k * scattering_length(b, shifted.spectrum, bg, guard));
}

double sin2_delta(double energy, double b, const BareSpectrum& spectrum, const Background& bg,
                  PoleGuard guard) {
  const double s = std::sin(phase_shift(energy, b, spectrum, bg, guard));
  return s * s;
}

void PhaseGridSpec::validate() const {
  if (e_values.empty() || b_values.empty()) {
    throw Error(ErrorKind::invalid_argument, "phase grid axes must be nonempty");
  }
  for (double e : e_values) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw Error(ErrorKind::invalid_argument, "grid energies must be finite and non-negative");
    }
  }
  for (double b : b_values) {
    if (!std::isfinite(b)) throw Error(ErrorKind::invalid_argument, "grid fields must be finite");
  }
  (void)spectrum.delta_mu();
}

std::size_t PhaseGrid::masked_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

namespace {

void fill_row(const PhaseGridSpec& spec, std::size_t row, PhaseGrid& grid) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const double energy = spec.e_values[row];
  const double k = wave_number(energy, spec.bg);
  const std::size_t cols = spec.b_values.size();

  auto mask_cell = [&](std::size_t c) {
    const auto idx = grid.index(row, c);
    grid.sin2[idx] = nan;
    grid.phase[idx] = nan;
    grid.mask[idx] = 1;
  };

  if (k == 0.0) {
    for (std::size_t c = 0; c < cols; ++c) {
      grid.sin2[grid.index(row, c)] = 0.0;
      grid.phase[grid.index(row, c)] = 0.0;
    }
    return;
  }

  std::optional<ShiftedSpectrum> shifted;
  try {
    shifted.emplace(energy_shifted_spectrum(spec.spectrum, energy));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate_positions) throw;
    for (std::size_t c = 0; c < cols; ++c) mask_cell(c);
    return;
  }

  for (std::size_t c = 0; c < cols; ++c) {
    try {
      const double ka = k * scattering_length(spec.b_values[c], shifted->spectrum, spec.bg, spec.guard);
      const auto idx = grid.index(row, c);
      grid.phase[idx] = -std::atan(ka);
      grid.sin2[idx] = std::isinf(ka) ? 1.0 : ka * ka / (1.0 + ka * ka);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::pole_proximity) throw;
      mask_cell(c);
    }
  }
}

}  // namespace

PhaseGrid sin2_delta_grid(const PhaseGridSpec& spec, unsigned workers) {
  spec.validate();
  PhaseGrid grid;
  grid.e_values = spec.e_values;
  grid.b_values = spec.b_values;
  const std::size_t cells = grid.rows() * grid.cols();
  grid.sin2.assign(cells, 0.0);
  grid.phase.assign(cells, 0.0);
  grid.mask.assign(cells, 0);

  const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(grid.rows())));
  if (n_workers == 1) {
    for (std::size_t r = 0; r < grid.rows(); ++r) fill_row(spec, r, grid);
    return grid;
  }
  // Rows are interleaved across workers; each cell is written by exactly one thread.
  std::vector<std::exception_ptr> errors(n_workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = w; r < grid.rows(); r += n_workers) fill_row(spec, r, grid);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return grid;
}

std::vector<double> locate_ridges(std::span<const double> b_values, std::span<const double> phase_row,
                                  std::span<const std::uint8_t> mask_row) {
  if (b_values.size() != phase_row.size() || mask_row.size() != phase_row.size()) {
    throw Error(ErrorKind::length_mismatch, "ridge search inputs differ in length");
  }
  constexpr double half_pi = 0.5 * std::numbers::pi;
  constexpr double noise = 1e-12;
  std::vector<double> ridges;

  // Between poles a(B) is monotone (da/dB = a_bg sum Delta_i/(B-B_i)^2 / F^2),
  // so delta drifts one way and jumps the other way at each pole. The drift
  // direction is the majority direction of the steps.
  std::vector<std::size_t> open;
  for (std::size_t c = 0; c < phase_row.size(); ++c) {
    if (mask_row[c] == 0) open.push_back(c);
  }
  std::ptrdiff_t balance = 0;
  for (std::size_t i = 0; i + 1 < open.size(); ++i) {
    const double step = phase_row[open[i + 1]] - phase_row[open[i]];
    if (step > noise) ++balance;
    if (step < -noise) --balance;
  }
  if (balance == 0) return ridges;
  const double jump_sign = balance < 0 ? 1.0 : -1.0;

  for (std::size_t i = 0; i + 1 < open.size(); ++i) {
    const std::size_t lo = open[i];
    const std::size_t hi = open[i + 1];
    const double d0 = phase_row[lo];
    const double d1 = phase_row[hi];
    if (jump_sign * (d1 - d0) <= noise) continue;
    if (hi - lo > 1) {
      // Masked cells sit on the pole.
      ridges.push_back(0.5 * (b_values[lo + 1] + b_values[hi - 1]));
    } else if (std::abs(d1 - d0) > half_pi) {
      // -1/(k a) = cot(delta) passes through zero at the pole.
      const double c0 = std::cos(d0) / std::sin(d0);
      const double c1 = std::cos(d1) / std::sin(d1);
      const double t = (c0 == c1) ? 0.5 : c0 / (c0 - c1);
      ridges.push_back(b_values[lo] + std::clamp(t, 0.0, 1.0) * (b_values[hi] - b_values[lo]));
    } else {
      // Resonance narrower than the grid: only the cell is known.
      ridges.push_back(0.5 * (b_values[lo] + b_values[hi]));
    }
  }
  return ridges;
}

}  // namespace reschaos
