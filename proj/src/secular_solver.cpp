#include "reschaos/secular_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "reschaos/error.hpp"

namespace reschaos {

namespace {

// Secular function evaluated at origin + t, with the pole offsets
// origin - p_j precomputed so that the distance to the origin pole is exact.
struct ShiftedSecular {
  std::span<const double> coeffs;
  std::vector<double> offsets;

  ShiftedSecular(std::span<const double> c, std::span<const double> poles, double origin)
      : coeffs(c), offsets(poles.size()) {
    for (std::size_t j = 0; j < poles.size(); ++j) offsets[j] = origin - poles[j];
  }

  [[nodiscard]] double value(double t) const noexcept {
    double sum = 0.0;
    for (std::size_t j = 0; j < offsets.size(); ++j) sum += coeffs[j] / (offsets[j] + t);
    return 1.0 - sum;
  }

  [[nodiscard]] double derivative(double t) const noexcept {
    double sum = 0.0;
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      const double x = offsets[j] + t;
      sum += coeffs[j] / (x * x);
    }
    return sum;
  }
};

// Newton iteration safeguarded by bisection on a bracket with f(lo) < 0 < f(hi).
double refine(const ShiftedSecular& f, double lo, double hi, const SolverOptions& options) {
  const double lo0 = lo;
  const double hi0 = hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < options.max_iterations; ++it) {
    const double fx = f.value(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dfx = f.derivative(x);
    double next = x - fx / dfx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= options.tol || hi - lo <= options.tol) {
      // Newton polish until the residual stops shrinking; costs a few evaluations.
      double f_best = std::abs(f.value(x));
      for (int p = 0; p < 8 && f_best > 0.0; ++p) {
        const double candidate = x - f.value(x) / f.derivative(x);
        if (!(candidate >= lo0 && candidate <= hi0)) break;
        const double f_candidate = std::abs(f.value(candidate));
        if (!(f_candidate < f_best)) break;
        x = candidate;
        f_best = f_candidate;
      }
      return x;
    }
    if (lo == hi) return x;
  }
  return x;
}

[[noreturn]] void bracket_failure(std::size_t k) {
  throw Error(ErrorKind::bracket_failure, "no sign change in bracket of root " + std::to_string(k));
}

double solve_interval(std::span<const double> coeffs, std::span<const double> poles, std::size_t k,
                      const SolverOptions& options) {
  const std::size_t n = poles.size();
  const bool last = (k + 1 == n);

  if (last) {
    const double total = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
    ShiftedSecular f(coeffs, poles, poles[k]);
    const double hi = total;
    const double f_hi = f.value(hi);
    if (f_hi == 0.0) return poles[k] + hi;
    double lo = options.pole_offset * total;
    while (f.value(lo) >= 0.0) {
      lo *= 1e-3;
      if (lo < std::numeric_limits<double>::min()) bracket_failure(k);
    }
    if (f_hi < 0.0) bracket_failure(k);
    return poles[k] + refine(f, lo, hi, options);
  }

  const double gap = poles[k + 1] - poles[k];
  ShiftedSecular from_left(coeffs, poles, poles[k]);
  const double f_mid = from_left.value(0.5 * gap);
  if (f_mid == 0.0) return poles[k] + 0.5 * gap;

  if (f_mid > 0.0) {
    double lo = options.pole_offset * gap;
    while (from_left.value(lo) >= 0.0) {
      lo *= 1e-3;
      if (lo < std::numeric_limits<double>::min()) bracket_failure(k);
    }
    return poles[k] + refine(from_left, lo, 0.5 * gap, options);
  }

  ShiftedSecular from_right(coeffs, poles, poles[k + 1]);
  double hi = -options.pole_offset * gap;
  while (from_right.value(hi) <= 0.0) {
    hi *= 1e-3;
    if (-hi < std::numeric_limits<double>::min()) bracket_failure(k);
  }
  return poles[k + 1] + refine(from_right, -0.5 * gap, hi, options);
}

void check_poles(std::span<const double> coeffs, std::span<const double> poles) {
  if (coeffs.size() != poles.size()) {
    throw Error(ErrorKind::length_mismatch, "coeffs and poles differ in length");
  }
  for (std::size_t j = 1; j < poles.size(); ++j) {
    if (!(poles[j] > poles[j - 1])) {
      throw Error(ErrorKind::invalid_argument, "poles must be strictly increasing");
    }
  }
}

double bisect_plain(std::span<const double> coeffs, std::span<const double> poles, double lo,
                    double hi, double f_lo, const SolverOptions& options) {
  auto f = [&](double b) {
    double s = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) s += coeffs[j] / (b - poles[j]);
    return 1.0 - s;
  };
  for (int it = 0; it < options.max_iterations && hi - lo > options.tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Zeros of the numerator polynomial prod(b - p_j) * F(b). Poles with a zero
// coefficient are themselves zeros; the remainder goes through the bracketing
// solver when possible and through the scan otherwise.
std::vector<double> numerator_zeros(std::span<const double> coeffs, std::span<const double> poles,
                                    const SolverOptions& options, bool& used_fallback) {
  std::vector<double> zeros;
  std::vector<double> c_rest;
  std::vector<double> p_rest;
  for (std::size_t j = 0; j < poles.size(); ++j) {
    if (coeffs[j] == 0.0) {
      zeros.push_back(poles[j]);
    } else {
      c_rest.push_back(coeffs[j]);
      p_rest.push_back(poles[j]);
    }
  }
  if (!c_rest.empty()) {
    const bool all_positive = std::all_of(c_rest.begin(), c_rest.end(), [](double c) { return c > 0.0; });
    std::vector<double> roots;
    if (all_positive) {
      roots = solve_secular(c_rest, p_rest, options);
    } else {
      roots = scan_secular(c_rest, p_rest, 400, options).roots;
      used_fallback = true;
    }
    zeros.insert(zeros.end(), roots.begin(), roots.end());
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

}  // namespace

std::vector<double> solve_secular(std::span<const double> coeffs, std::span<const double> poles,
                                  const SolverOptions& options) {
  check_poles(coeffs, poles);
  if (!(options.tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (!(coeffs[j] > 0.0)) {
      throw Error(ErrorKind::non_positive_coefficient,
                  "coefficient " + std::to_string(j) + " is not positive; use scan_secular");
    }
  }
  std::vector<double> roots(poles.size());
  for (std::size_t k = 0; k < poles.size(); ++k) roots[k] = solve_interval(coeffs, poles, k, options);
  return roots;
}

bool root_converged(double root, std::span<const double> coeffs, std::span<const double> poles,
                    double tolerance, int ulps) {
  auto f = [&](double b) {
    double s = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) s += coeffs[j] / (b - poles[j]);
    return 1.0 - s;
  };
  const double f0 = f(root);
  if (std::abs(f0) < tolerance) return true;
  double below = root;
  double above = root;
  for (int i = 0; i < ulps; ++i) {
    below = std::nextafter(below, -std::numeric_limits<double>::infinity());
    above = std::nextafter(above, std::numeric_limits<double>::infinity());
  }
  for (double p : poles) {
    if (p >= below && p <= above) return false;
  }
  const double fb = f(below);
  const double fa = f(above);
  return (fb <= 0.0 && fa >= 0.0) || (fb >= 0.0 && fa <= 0.0);
}

SecularScan scan_secular(std::span<const double> coeffs, std::span<const double> poles,
                         int points_per_gap, const SolverOptions& options) {
  check_poles(coeffs, poles);
  SecularScan out;
  out.warning = true;
  if (poles.empty()) return out;

  double reach = 0.0;
  for (double c : coeffs) reach += std::abs(c);
  reach = std::max(reach, 1e-300);

  std::vector<double> edges;
  edges.reserve(poles.size() + 2);
  edges.push_back(poles.front() - reach);
  edges.insert(edges.end(), poles.begin(), poles.end());
  edges.push_back(poles.back() + reach);

  auto f = [&](double b) {
    double s = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) s += coeffs[j] / (b - poles[j]);
    return 1.0 - s;
  };

  const int m = std::max(points_per_gap, 2);
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e];
    const double b = edges[e + 1];
    const double pad = options.pole_offset * (b - a);
    const double lo = a + (e == 0 ? 0.0 : pad);
    const double hi = b - (e + 2 == edges.size() ? 0.0 : pad);
    double x_prev = lo;
    double f_prev = f(lo);
    for (int i = 1; i <= m; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / m;
      const double fx = f(x);
      if (f_prev == 0.0) {
        out.roots.push_back(x_prev);
      } else if ((fx < 0.0) != (f_prev < 0.0) && fx != 0.0) {
        out.roots.push_back(bisect_plain(coeffs, poles, x_prev, x, f_prev, options));
      }
      x_prev = x;
      f_prev = fx;
    }
    if (f_prev == 0.0) out.roots.push_back(x_prev);
  }
  std::sort(out.roots.begin(), out.roots.end());
  out.roots.erase(std::unique(out.roots.begin(), out.roots.end()), out.roots.end());
  return out;
}

std::vector<double> find_resonance_positions(const BareSpectrum& spectrum, const Background& bg,
                                             const SolverOptions& options) {
  bool fallback = false;
  const auto shifts = shift_table(spectrum, bg);
  return numerator_zeros(shifts, spectrum.positions(), options, fallback);
}

std::vector<double> find_scattering_zeros(const BareSpectrum& spectrum, const Background& bg,
                                          const SolverOptions& options) {
  bool fallback = false;
  auto coeffs = shift_table(spectrum, bg);
  const auto widths = spectrum.widths();
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += widths[i];
  return numerator_zeros(coeffs, spectrum.positions(), options, fallback);
}

std::vector<double> effective_widths(std::span<const double> positions_res,
                                     std::span<const double> zeros) {
  if (positions_res.size() != zeros.size()) {
    throw Error(ErrorKind::length_mismatch,
                std::to_string(positions_res.size()) + " positions vs " +
                    std::to_string(zeros.size()) + " zeros");
  }
  std::vector<double> widths(zeros.size());
  for (std::size_t i = 0; i < zeros.size(); ++i) widths[i] = zeros[i] - positions_res[i];
  return widths;
}

DressResult dress(const BareSpectrum& spectrum, const Background& bg, const SolverOptions& options) {
  DressResult out;
  const auto shifts = shift_table(spectrum, bg);
  auto coeffs = shifts;
  const auto widths = spectrum.widths();
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += widths[i];

  out.dressed.positions_res = numerator_zeros(shifts, spectrum.positions(), options, out.used_fallback);
  const auto zeros = numerator_zeros(coeffs, spectrum.positions(), options, out.used_fallback);
  out.dressed.widths_eff = effective_widths(out.dressed.positions_res, zeros);
  return out;
}

}  // namespace reschaos
