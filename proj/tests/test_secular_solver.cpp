#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "random_spectra.hpp"
#include "reschaos/error.hpp"
#include "reschaos/secular_solver.hpp"

using namespace reschaos;

namespace {

// (1.2 -+ sqrt(1.04)) / 2, from a 30-digit evaluation.
constexpr double kRootLo = 0.0900980486407215169972;
constexpr double kRootHi = 1.10990195135927846951;

// Sign-change brute force on a uniform grid of `points` over [lo, hi].
std::vector<double> brute_force_roots(std::span<const double> c, std::span<const double> p,
                                      double lo, double hi, std::size_t points) {
  std::vector<double> roots;
  const double h = (hi - lo) / static_cast<double>(points - 1);
  auto f = [&](double b) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) s += c[j] / (b - p[j]);
    return 1.0 - s;
  };
  double prev_b = lo;
  double prev = f(lo);
  for (std::size_t k = 1; k < points; ++k) {
    const double b = lo + h * static_cast<double>(k);
    const double cur = f(b);
    const bool pole_between = std::any_of(p.begin(), p.end(), [&](double q) { return q > prev_b && q <= b; });
    if (!pole_between && ((prev < 0.0) != (cur < 0.0))) roots.push_back(0.5 * (prev_b + b));
    prev_b = b;
    prev = cur;
  }
  return roots;
}

}  // namespace

TEST_SUITE("secular_solver") {

TEST_CASE("one pole is solved exactly") {
  const std::vector<double> c{0.3};
  const std::vector<double> p{2.0};
  const auto roots = solve_secular(c, p);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(2.3).epsilon(1e-15));

  const BareSpectrum s(5.0, {2.0}, {0.9});
  const Background bg(0.4);
  const double shift = resonance_shift(0.9, 0.4);
  CHECK(find_resonance_positions(s, bg)[0] == doctest::Approx(2.0 + shift).epsilon(1e-15));
  CHECK(find_scattering_zeros(s, bg)[0] == doctest::Approx(2.0 + shift + 0.9).epsilon(1e-15));
  const auto w = dress(s, bg).dressed.widths_eff;
  CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-13));
}

TEST_CASE("two poles against the quadratic formula") {
  const std::vector<double> c{0.1, 0.1};
  const std::vector<double> p{0.0, 1.0};
  const auto roots = solve_secular(c, p);
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(roots[0] - kRootLo) < 1e-14);
  CHECK(std::abs(roots[1] - kRootHi) < 1e-14);

  // Widths 0.5 at r = 0.5 give shifts of exactly 0.1.
  const BareSpectrum s(2.0, {0.0, 1.0}, {0.5, 0.5});
  const Background bg(0.5);
  const auto pos = find_resonance_positions(s, bg);
  CHECK(std::abs(pos[0] - kRootLo) < 1e-14);
  CHECK(std::abs(pos[1] - kRootHi) < 1e-14);

  // Zeros of a: coefficients shift + width = 0.6, roots of b^2 - 2.2 b + 0.6.
  const auto zeros = find_scattering_zeros(s, bg);
  CHECK(std::abs(zeros[0] - 0.318975032409334560587) < 1e-14);
  CHECK(std::abs(zeros[1] - 1.88102496759066543941) < 1e-14);

  // Coefficients 0.3 at poles {0, 1}: roots of b^2 - 1.6 b + 0.3.
  const std::vector<double> c3{0.3, 0.3};
  const auto r3 = solve_secular(c3, p);
  CHECK(std::abs(r3[0] - 0.216904810515469976377) < 1e-14);
  CHECK(std::abs(r3[1] - 1.38309518948453011244) < 1e-14);

  const auto w = effective_widths(roots, r3);
  CHECK(std::abs(w[0] - 0.126806761874748490294) < 1e-14);
  CHECK(std::abs(w[1] - 0.273193238125251642933) < 1e-14);
  CHECK(w[0] + w[1] == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("r = 1 leaves the bare positions untouched") {
  const auto s = testing_support::random_spectrum(20, 77);
  const auto pos = find_resonance_positions(s, Background(1.0));
  REQUIRE(pos.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(pos[i] == s.positions()[i]);
}

TEST_CASE("residuals, interlacing and sum rule on N = 50") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = testing_support::random_spectrum(50, seed * 31);
    const Background bg(0.5);
    const auto shifts = shift_table(s, bg);
    const auto roots = solve_secular(shifts, s.positions());
    REQUIRE(roots.size() == 50);
    const auto p = s.positions();
    const double total = std::accumulate(shifts.begin(), shifts.end(), 0.0);
    for (std::size_t k = 0; k < 50; ++k) {
      CHECK(root_converged(roots[k], shifts, p));
      CHECK(roots[k] > p[k]);
      if (k + 1 < 50) CHECK(roots[k] < p[k + 1]);
    }
    CHECK(roots.back() <= p.back() + total);

    const auto dressed = dress(s, bg).dressed;
    const double sum_eff = std::accumulate(dressed.widths_eff.begin(), dressed.widths_eff.end(), 0.0);
    const double sum_bare = std::accumulate(s.widths().begin(), s.widths().end(), 0.0);
    CHECK(std::abs(sum_eff - sum_bare) <= 1e-9 * sum_bare);
  }
}

TEST_CASE("well separated roots meet the plain residual bound") {
  std::vector<double> p, c;
  for (int k = 0; k < 50; ++k) {
    p.push_back(k);
    c.push_back(0.05 + 0.01 * (k % 7));
  }
  for (double x : solve_secular(c, p)) CHECK(std::abs(secular_value(x, c, p)) < 1e-9);
}

TEST_CASE("matches a fine sign scan for N <= 10") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t n = 1 + seed % 10;
    const auto s = testing_support::random_spectrum(n, seed + 9000);
    const auto shifts = shift_table(s, Background(0.5));
    const auto p = s.positions();
    const double total = std::accumulate(shifts.begin(), shifts.end(), 0.0);
    const double lo = p.front() - 1.0;
    const double hi = p.back() + total + 1.0;
    const double h = (hi - lo) / (1e6 - 1.0);
    const auto brute = brute_force_roots(shifts, p, lo, hi, 1000000);
    const auto roots = solve_secular(shifts, p);
    // Roots closer to a pole than the grid step can hide inside one cell.
    std::size_t unresolved = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(roots[k] - p[k]) < h) ++unresolved;
    }
    REQUIRE(brute.size() + unresolved == n);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(roots[k] - p[k]) < h) continue;
      CHECK(std::abs(roots[k] - brute[j]) <= h);
      ++j;
    }
  }
}

TEST_CASE("larger coefficients push every root up") {
  const auto s = testing_support::random_spectrum(15, 5150);
  auto shifts = shift_table(s, Background(0.5));
  const auto before = solve_secular(shifts, s.positions());
  for (auto& c : shifts) c *= 1.1;
  const auto after = solve_secular(shifts, s.positions());
  for (std::size_t k = 0; k < before.size(); ++k) CHECK(after[k] > before[k]);
}

TEST_CASE("non-positive coefficients") {
  const std::vector<double> c{0.1, -0.05, 0.2};
  const std::vector<double> p{0.0, 1.0, 2.0};
  CHECK_THROWS_AS((void)solve_secular(c, p), Error);
  const auto scan = scan_secular(c, p);
  CHECK(scan.warning);
  for (double x : scan.roots) CHECK(std::abs(secular_value(x, c, p)) < 1e-9);

  // Mixed widths route dress() through the scan.
  const BareSpectrum s(3.0, {0.0, 1.0, 2.0}, {0.5, -0.25, 1.0});
  const auto result = dress(s, Background(0.5));
  CHECK(result.used_fallback);
}

TEST_CASE("zeros make a vanish") {
  const Background bg(0.5);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = testing_support::random_spectrum(30, seed * 8080);
    for (double z : find_scattering_zeros(s, bg)) {
      CHECK(std::abs(scattering_length(z, s, bg)) < 1e-8 * bg.a_bg());
    }
  }
}

TEST_CASE("effective widths need matching lengths") {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{1.5};
  try {
    (void)effective_widths(a, b);
    FAIL("expected length mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::length_mismatch);
  }
}

}  // TEST_SUITE
