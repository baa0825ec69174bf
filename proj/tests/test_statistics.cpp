#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "reschaos/ensembles.hpp"
#include "reschaos/error.hpp"
#include "reschaos/statistics.hpp"

using namespace reschaos;

namespace {

SpacingSample sample_of(std::vector<double> s) { return SpacingSample{std::move(s), "test", std::nullopt}; }

std::vector<double> cumulative(const std::vector<double>& spacings) {
  std::vector<double> pos{0.0};
  for (double s : spacings) pos.push_back(pos.back() + s);
  return pos;
}

}  // namespace

TEST_SUITE("statistics") {

TEST_CASE("unfolding") {
  const std::vector<double> grid{0, 1, 2, 3};
  CHECK(unfold_spacings(grid).spacings == std::vector<double>{1, 1, 1});
  const auto s = unfold_spacings(std::vector<double>{0, 1, 3}).spacings;
  CHECK(s[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  const auto pos = sample_poisson_positions(1000, 37.0, 5);
  const auto once = unfold_positions(pos);
  std::vector<double> scaled(once);
  for (auto& x : scaled) x *= 4.25;
  const auto twice = unfold_positions(scaled);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-12));

  const auto sp = unfold_spacings(pos).spacings;
  CHECK(std::accumulate(sp.begin(), sp.end(), 0.0) / static_cast<double>(sp.size()) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> window{-1.0, 0.0, 0.5, 2.0, 2.5};
  CHECK(restrict_to_window(window, 0.0, 2.0) == std::vector<double>{0.0, 0.5, 2.0});
}

TEST_CASE("Brody limits") {
  CHECK(brody_alpha(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(brody_alpha(1.0) == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-14));
  CHECK(brody_alpha(0.5) == doctest::Approx(0.8577245662047803260562).epsilon(1e-14));
  for (double s : {0.01, 0.5, 1.0, 2.7, 6.0}) {
    CHECK(reference_pdf(BrodyLaw{0.0}, s) == doctest::Approx(std::exp(-s)).epsilon(1e-14));
    CHECK(reference_pdf(PoissonLaw{}, s) == doctest::Approx(std::exp(-s)).epsilon(1e-14));
    const double wd = std::numbers::pi * s / 2.0 * std::exp(-std::numbers::pi * s * s / 4.0);
    CHECK(reference_pdf(BrodyLaw{1.0}, s) == doctest::Approx(wd).epsilon(1e-13));
    CHECK(reference_pdf(WignerDysonLaw{}, s) == doctest::Approx(wd).epsilon(1e-14));
    CHECK(reference_pdf(SemiPoissonLaw{}, s) == doctest::Approx(4.0 * s * std::exp(-2.0 * s)).epsilon(1e-14));
  }
}

TEST_CASE("reference densities are normalised with unit mean") {
  boost::math::quadrature::exp_sinh<double> integrator;
  const std::vector<SpacingLaw> laws{PoissonLaw{}, WignerDysonLaw{}, SemiPoissonLaw{}, BrodyLaw{0.2},
                                     BrodyLaw{0.6}, BrodyLaw{0.95}};
  for (const auto& law : laws) {
    const double norm = integrator.integrate([&](double s) { return reference_pdf(law, s); });
    const double first = integrator.integrate([&](double s) { return s * reference_pdf(law, s); });
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(first == doctest::Approx(1.0).epsilon(1e-10));
    const double tail = integrator.integrate([&](double s) { return reference_pdf(law, s); }, 1.3,
                                             std::numeric_limits<double>::infinity());
    CHECK(reference_cdf(law, 1.3) == doctest::Approx(1.0 - tail).epsilon(1e-10));
  }
}

TEST_CASE("fit limits") {
  const auto poisson = fit_brody(sample_of(sample_exponential_spacings(100000, 3)));
  CHECK(poisson.eta < 0.05);
  CHECK(poisson.converged);
  const auto wd = fit_brody(sample_of(sample_wd_spacings(100000, 4)));
  CHECK(wd.eta > 0.92);
  CHECK(wd.eta <= 1.0);
}

TEST_CASE("fit round trip") {
  for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto fit = fit_brody(sample_of(sample_brody_spacings(eta, 100000, 21)));
    CHECK(std::abs(fit.eta - eta) < 0.03);
    CHECK(fit.n_samples == 100000);
    FitOptions mle;
    mle.method = FitMethod::maximum_likelihood;
    CHECK(std::abs(fit_brody(sample_of(sample_brody_spacings(eta, 100000, 22)), mle).eta - eta) < 0.03);
  }
}

TEST_CASE("fit is scale invariant") {
  const auto pos = cumulative(sample_brody_spacings(0.4, 2000, 6));
  std::vector<double> scaled(pos);
  for (auto& x : scaled) x = 3.5 * x + 11.0;
  const double a = fit_brody(unfold_spacings(pos)).eta;
  const double b = fit_brody(unfold_spacings(scaled)).eta;
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("fit needs enough points") {
  try {
    (void)fit_brody(sample_of({1.0, 1.0, 1.0}));
    FAIL("expected too_few_points");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::too_few_points);
  }
}

TEST_CASE("mean eta over realizations") {
  BrodyFit a;
  a.eta = 0.5;
  a.converged = true;
  BrodyFit b = a;
  b.eta = 0.7;
  const std::vector<BrodyFit> two{a, b};
  const auto summary = mean_eta_over_realizations(two);
  CHECK(summary.mean == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(summary.std_dev == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(summary.count == 2);

  const std::vector<BrodyFit> same{a, a, a};
  CHECK(mean_eta_over_realizations(same).std_dev == 0.0);

  const std::vector<BrodyFit> one{a};
  CHECK_THROWS_AS((void)mean_eta_over_realizations(one), Error);
  BrodyFit bad = a;
  bad.converged = false;
  const std::vector<BrodyFit> with_bad{a, bad};
  try {
    (void)mean_eta_over_realizations(with_bad);
    FAIL("expected fit_failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::fit_failure);
  }
}

TEST_CASE("number variance of a rigid grid") {
  std::vector<double> grid(400);
  std::iota(grid.begin(), grid.end(), 0.0);
  const std::vector<double> lengths{1, 2, 5, 10};
  const auto curve = number_variance(grid, lengths, 0.25);
  for (double v : curve.sigma2) CHECK(v == 0.0);
  for (auto n : curve.window_count) CHECK(n > 0);
}

TEST_CASE("number variance of Poisson points") {
  const auto pos = unfold_positions(sample_poisson_positions(200000, 200000.0, 77));
  const std::vector<double> lengths{0.5, 1, 2, 5};
  const auto curve = number_variance(pos, lengths, 0.25);
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    // Overlapping windows: use the independent-window count for the error bar.
    const double independent = (pos.back() - pos.front()) / lengths[i];
    const double L = lengths[i];
    const double se = std::sqrt((2.0 * L * L + L) / independent);
    CHECK(std::abs(curve.sigma2[i] - L) < 3.0 * se + 0.01 * L);
  }
}

TEST_CASE("number variance rejects oversized windows") {
  std::vector<double> grid(40);
  std::iota(grid.begin(), grid.end(), 0.0);
  const std::vector<double> lengths{20.0};
  try {
    (void)number_variance(grid, lengths);
    FAIL("expected window_too_large");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::window_too_large);
  }
}

TEST_CASE("reference number variance") {
  CHECK(reference_sigma2(Sigma2Reference::poisson, 2.0) == 2.0);
  CHECK(reference_sigma2(Sigma2Reference::semi_poisson, 1.0) ==
        doctest::Approx(0.6227105451389082274633).epsilon(1e-14));
  CHECK(reference_sigma2(Sigma2Reference::semi_poisson, 1e-6) == doctest::Approx(1e-6).epsilon(1e-5));
  CHECK(reference_sigma2(Sigma2Reference::goe, 1.0) == doctest::Approx(0.4420424755695247778).epsilon(1e-14));
  CHECK(reference_sigma2(Sigma2Reference::goe, 5.0) == doctest::Approx(0.7681827841428772207).epsilon(1e-14));
}

TEST_CASE("histogram") {
  const std::vector<double> s{0.1, 0.2, 0.6, 0.9, 3.0};
  const auto bins = spacing_histogram(s, 0.5, 2.0);
  REQUIRE(bins.size() == 4);
  CHECK(bins[0].count == 2);
  CHECK(bins[1].count == 2);
  CHECK(bins[2].count == 0);
  CHECK(bins[0].density == doctest::Approx(2.0 / (5 * 0.5)));
}

}  // TEST_SUITE
