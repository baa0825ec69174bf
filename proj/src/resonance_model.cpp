#include "reschaos/resonance_model.hpp"

#include <cmath>
#include <string>

#include "reschaos/error.hpp"

namespace reschaos {

namespace {

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void check_pole_distance(double b, std::span<const double> poles, PoleGuard guard) {
  for (std::size_t j = 0; j < poles.size(); ++j) {
    if (std::abs(b - poles[j]) < guard.epsilon) {
      throw Error(ErrorKind::pole_proximity,
                  "b = " + std::to_string(b) + " coincides with pole " + std::to_string(j));
    }
  }
}

// First-order distance to a zero of F below the guard.
void check_secular_zero(double b, double f, double df, PoleGuard guard) {
  if (std::abs(f) < guard.epsilon * std::abs(df) || f == 0.0) {
    throw Error(ErrorKind::pole_proximity,
                "b = " + std::to_string(b) + " is within the guard of a zero of the secular function");
  }
}

}  // namespace

Background::Background(double r, double abar, double ebar) : r_(r), abar_(abar), ebar_(ebar) {
  if (!std::isfinite(r)) throw Error(ErrorKind::invalid_argument, "r must be finite");
  if (!(abar > 0.0) || !std::isfinite(abar)) {
    throw Error(ErrorKind::invalid_argument, "abar must be positive");
  }
  if (!(ebar > 0.0) || !std::isfinite(ebar)) {
    throw Error(ErrorKind::invalid_argument, "ebar must be positive");
  }
}

BareSpectrum::BareSpectrum(double b_max, std::vector<double> positions, std::vector<double> widths,
                           std::optional<std::vector<double>> delta_mu)
    : b_max_(b_max),
      positions_(std::move(positions)),
      widths_(std::move(widths)),
      delta_mu_(std::move(delta_mu)) {
  if (!(b_max_ > 0.0) || !std::isfinite(b_max_)) {
    throw Error(ErrorKind::invalid_argument, "b_max must be positive and finite");
  }
  if (positions_.size() != widths_.size()) {
    throw Error(ErrorKind::length_mismatch, "positions and widths differ in length");
  }
  if (!all_finite(positions_) || !all_finite(widths_)) {
    throw Error(ErrorKind::invalid_argument, "positions and widths must be finite");
  }
  for (std::size_t i = 1; i < positions_.size(); ++i) {
    if (positions_[i] == positions_[i - 1]) {
      throw Error(ErrorKind::degenerate_positions,
                  "bare positions " + std::to_string(i - 1) + " and " + std::to_string(i) +
                      " coincide");
    }
    if (positions_[i] < positions_[i - 1]) {
      throw Error(ErrorKind::invalid_argument, "bare positions must be strictly increasing");
    }
  }
  if (delta_mu_) {
    if (delta_mu_->size() != positions_.size()) {
      throw Error(ErrorKind::length_mismatch, "delta_mu length differs from positions");
    }
    for (double mu : *delta_mu_) {
      if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw Error(ErrorKind::invalid_argument, "delta_mu values must be positive");
      }
    }
  }
}

std::span<const double> BareSpectrum::delta_mu() const {
  if (!delta_mu_) throw Error(ErrorKind::missing_delta_mu, "spectrum has no delta_mu column");
  return *delta_mu_;
}

double BareSpectrum::mean_spacing() const noexcept {
  return positions_.empty() ? b_max_ : b_max_ / static_cast<double>(positions_.size());
}

bool BareSpectrum::has_non_positive_widths() const noexcept {
  for (double w : widths_) {
    if (!(w > 0.0)) return true;
  }
  return false;
}

PoleGuard PoleGuard::for_spectrum(const BareSpectrum& spectrum, double relative) {
  return PoleGuard{relative * spectrum.mean_spacing()};
}

double resonance_shift(double width, double r) noexcept {
  const double q = 1.0 - r;
  return r * q / (1.0 + q * q) * width;
}

std::vector<double> shift_table(const BareSpectrum& spectrum, const Background& bg) {
  std::vector<double> shifts;
  shifts.reserve(spectrum.size());
  for (double w : spectrum.widths()) shifts.push_back(resonance_shift(w, bg.r()));
  return shifts;
}

double secular_derivative(double b, std::span<const double> coeffs,
                          std::span<const double> poles) noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < poles.size(); ++j) {
    const double x = b - poles[j];
    sum += coeffs[j] / (x * x);
  }
  return sum;
}

double secular_value(double b, std::span<const double> coeffs, std::span<const double> poles,
                     PoleGuard guard) {
  if (coeffs.size() != poles.size()) {
    throw Error(ErrorKind::length_mismatch, "coeffs and poles differ in length");
  }
  check_pole_distance(b, poles, guard);
  double sum = 0.0;
  for (std::size_t j = 0; j < poles.size(); ++j) sum += coeffs[j] / (b - poles[j]);
  return 1.0 - sum;
}

double local_denominator(std::size_t i, double b, const BareSpectrum& spectrum,
                         std::span<const double> shifts) {
  const auto pos = spectrum.positions();
  if (i >= pos.size()) throw Error(ErrorKind::invalid_argument, "resonance index out of range");
  double d = b - pos[i] - shifts[i];
  for (std::size_t j = 0; j < pos.size(); ++j) {
    if (j == i) continue;
    d -= (b - pos[i]) / (b - pos[j]) * shifts[j];
  }
  return d;
}

double scattering_length(double b, const BareSpectrum& spectrum, const Background& bg,
                         PoleGuard guard) {
  if (spectrum.empty()) return bg.a_bg();
  const auto pos = spectrum.positions();
  const auto widths = spectrum.widths();
  const auto shifts = shift_table(spectrum, bg);
  check_pole_distance(b, pos, guard);

  double f = 1.0;
  double df = 0.0;
  double g = 0.0;
  for (std::size_t j = 0; j < pos.size(); ++j) {
    const double inv = 1.0 / (b - pos[j]);
    f -= shifts[j] * inv;
    df += shifts[j] * inv * inv;
    g += widths[j] * inv;
  }
  check_secular_zero(b, f, df, guard);
  return bg.a_bg() * (1.0 - g / f);
}

double scattering_length_direct(double b, const BareSpectrum& spectrum, const Background& bg,
                                PoleGuard guard) {
  if (spectrum.empty()) return bg.a_bg();
  const auto pos = spectrum.positions();
  const auto widths = spectrum.widths();
  const auto shifts = shift_table(spectrum, bg);
  check_pole_distance(b, pos, guard);
  const double f = 1.0 - [&] {
    double s = 0.0;
    for (std::size_t j = 0; j < pos.size(); ++j) s += shifts[j] / (b - pos[j]);
    return s;
  }();
  check_secular_zero(b, f, secular_derivative(b, shifts, pos), guard);

  double sum = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    sum += widths[i] / local_denominator(i, b, spectrum, shifts);
  }
  return bg.a_bg() * (1.0 - sum);
}

double product_form_value(double b, const DressedSpectrum& dressed, const Background& bg,
                          PoleGuard guard) {
  if (dressed.positions_res.size() != dressed.widths_eff.size()) {
    throw Error(ErrorKind::length_mismatch, "dressed positions and widths differ in length");
  }
  check_pole_distance(b, dressed.positions_res, guard);
  double prod = bg.a_bg();
  for (std::size_t i = 0; i < dressed.positions_res.size(); ++i) {
    prod *= 1.0 - dressed.widths_eff[i] / (b - dressed.positions_res[i]);
  }
  return prod;
}

}  // namespace reschaos
