#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "random_spectra.hpp"
#include "reschaos/error.hpp"
#include "reschaos/resonance_model.hpp"
#include "reschaos/secular_solver.hpp"

using namespace reschaos;
using boost::multiprecision::cpp_rational;

namespace {

// a(b) summed over the local denominators in exact rational arithmetic.
cpp_rational exact_scattering_length(const cpp_rational& b, const std::vector<cpp_rational>& pos,
                                     const std::vector<cpp_rational>& width, const cpp_rational& r) {
  const cpp_rational factor = r * (1 - r) / (1 + (1 - r) * (1 - r));
  std::vector<cpp_rational> shift;
  for (const auto& w : width) shift.push_back(factor * w);
  cpp_rational sum = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    cpp_rational d = b - pos[i] - shift[i];
    for (std::size_t j = 0; j < pos.size(); ++j) {
      if (j != i) d -= (b - pos[i]) / (b - pos[j]) * shift[j];
    }
    sum += width[i] / d;
  }
  return r * (1 - sum);
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("resonance_model") {

TEST_CASE("shift formula") {
  CHECK(resonance_shift(1.0, 1.0) == 0.0);
  CHECK(resonance_shift(1.0, 0.0) == 0.0);
  CHECK(resonance_shift(2.0, 0.5) == doctest::Approx(0.4).epsilon(1e-15));

  Rng rng(99);
  for (int k = 0; k < 10; ++k) {
    const double r = rng.uniform(0.0, 2.0);
    const cpp_rational rq(r);
    const cpp_rational expect = rq * (1 - rq) / (1 + (1 - rq) * (1 - rq)) * 3;
    CHECK(resonance_shift(3.0, r) == doctest::Approx(static_cast<double>(expect)).epsilon(1e-14));
  }
}

TEST_CASE("empty spectrum gives the background") {
  const BareSpectrum empty(10.0, {}, {});
  const Background bg(0.7);
  for (double b : {-3.0, 0.0, 2.5, 100.0}) CHECK(scattering_length(b, empty, bg) == 0.7);
  CHECK(product_form_value(1.0, DressedSpectrum{}, bg) == 0.7);
}

TEST_CASE("two resonances against the rational oracle") {
  const BareSpectrum s(2.0, {0.0, 1.0}, {0.5, 0.5});
  const Background bg(0.5);
  const double exact = static_cast<double>(
      exact_scattering_length(cpp_rational(1, 2), {0, 1}, {cpp_rational(1, 2), cpp_rational(1, 2)},
                              cpp_rational(1, 2)));
  CHECK(exact == 0.5);
  CHECK(scattering_length(0.5, s, bg) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(scattering_length_direct(0.5, s, bg) == doctest::Approx(exact).epsilon(1e-14));

  // Off-symmetric points.
  for (double b : {-0.75, 0.3, 0.9, 1.6, 4.0}) {
    const double ref = static_cast<double>(exact_scattering_length(
        cpp_rational(b), {0, 1}, {cpp_rational(1, 2), cpp_rational(1, 2)}, cpp_rational(1, 2)));
    CHECK(rel_diff(scattering_length(b, s, bg), ref) < 1e-12);
  }
}

TEST_CASE("random spectra against the rational oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = testing_support::random_spectrum(6, seed);
    const Background bg(0.3 + 0.2 * static_cast<double>(seed));
    std::vector<cpp_rational> pos(s.positions().begin(), s.positions().end());
    std::vector<cpp_rational> wid(s.widths().begin(), s.widths().end());
    Rng rng(seed + 100);
    for (int k = 0; k < 10; ++k) {
      const double b = rng.uniform(-1.0, 7.0);
      const double ref = static_cast<double>(exact_scattering_length(cpp_rational(b), pos, wid, cpp_rational(bg.r())));
      CHECK(rel_diff(scattering_length(b, s, bg), ref) < 1e-9);
    }
  }
}

TEST_CASE("secular function basics") {
  const std::vector<double> c{0.1, 0.1};
  const std::vector<double> p{0.0, 1.0};
  CHECK(secular_value(0.5, c, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(secular_value(1e15, c, p) == doctest::Approx(1.0));
  CHECK(secular_value(-1e15, c, p) == doctest::Approx(1.0));
  const std::vector<double> zero{0.0, 0.0};
  CHECK(secular_value(0.3, zero, p) == 1.0);
  CHECK(secular_derivative(0.5, c, p) == doctest::Approx(0.8));
  try {
    (void)secular_value(1.0, c, p);
    FAIL("expected a pole error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::pole_proximity);
  }
}

TEST_CASE("denominator identity") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 2 + seed % 19;
    const auto s = testing_support::random_spectrum(n, seed);
    const Background bg(0.5);
    const auto shifts = shift_table(s, bg);
    Rng rng(seed * 7);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double b = rng.uniform(-1.0, static_cast<double>(n) + 1.0);
      const double f = secular_value(b, shifts, s.positions());
      double scale = 1.0;
      for (std::size_t j = 0; j < n; ++j) scale += std::abs(shifts[j] / (b - s.positions()[j]));
      for (std::size_t i = 0; i < n; ++i) {
        const double lhs = local_denominator(i, b, s, shifts);
        const double rhs = (b - s.positions()[i]) * f;
        worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(b - s.positions()[i]) * scale));
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("sum and product forms agree") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 1 + seed % 20;
    const auto s = testing_support::random_spectrum(n, seed + 500);
    const Background bg(0.5);
    const auto dressed = dress(s, bg).dressed;
    Rng rng(seed);
    for (int k = 0; k < 100; ++k) {
      const double b = rng.uniform(-2.0, static_cast<double>(n) + 2.0);
      const double a = scattering_length(b, s, bg);
      const double prod = product_form_value(b, dressed, bg);
      CHECK(std::abs(a - prod) <= 1e-8 * std::max(std::abs(a), bg.a_bg()));
    }
  }
}

TEST_CASE("single resonance reduces to the isolated formula") {
  const double b1 = 3.0;
  const double delta = 0.8;
  const Background bg(0.6);
  const BareSpectrum s(10.0, {b1}, {delta});
  const double b_res = b1 + resonance_shift(delta, bg.r());
  for (double b : {0.0, 2.5, 3.2, 3.9, 7.0}) {
    const double isolated = bg.a_bg() * (1.0 - delta / (b - b_res));
    CHECK(rel_diff(scattering_length(b, s, bg), isolated) < 1e-14);
  }
  CHECK(std::abs(scattering_length(b_res + delta, s, bg)) < 1e-15);
}

TEST_CASE("sign flips across each dressed pole") {
  const auto s = testing_support::random_spectrum(12, 4242);
  const Background bg(0.5);
  const auto poles = find_resonance_positions(s, bg);
  const auto zeros = find_scattering_zeros(s, bg);
  std::vector<double> critical(poles);
  critical.insert(critical.end(), zeros.begin(), zeros.end());
  critical.insert(critical.end(), s.positions().begin(), s.positions().end());
  for (double p : poles) {
    double gap = 1e300;
    for (double c : critical) {
      if (c != p) gap = std::min(gap, std::abs(c - p));
    }
    const double eps = gap * 1e-3;
    CHECK(scattering_length(p - eps, s, bg) * scattering_length(p + eps, s, bg) < 0.0);
  }
}

TEST_CASE("construction checks") {
  CHECK_THROWS_AS(BareSpectrum(1.0, {0.2, 0.2}, {1.0, 1.0}), Error);
  try {
    BareSpectrum(1.0, {0.2, 0.2}, {1.0, 1.0});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_positions);
  }
  CHECK_THROWS_AS(BareSpectrum(1.0, {0.2}, {1.0, 1.0}), Error);
  const BareSpectrum mixed(1.0, {0.2, 0.5}, {1.0, -0.5});
  CHECK(mixed.has_non_positive_widths());
  CHECK_THROWS_AS((void)mixed.delta_mu(), Error);
  CHECK(BareSpectrum(50.0, {1.0, 2.0}, {1.0, 1.0}).mean_spacing() == 25.0);
}

}  // TEST_SUITE
