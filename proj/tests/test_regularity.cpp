#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "ssm/regularity.hpp"

using namespace ssm;
using ssm::testing::cantor;
using ssm::testing::uniform_halves;

namespace {

double brute_pair_fraction(const std::vector<double>& x, double r) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) hits += std::abs(x[i] - x[j]) <= r;
  }
  const double pairs = 0.5 * static_cast<double>(x.size()) * static_cast<double>(x.size() - 1);
  return static_cast<double>(hits) / pairs;
}

}  // namespace

TEST_CASE("pair counting matches brute force") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(2 + trial * 7);
    // Coarse grid values force ties.
    for (auto& v : x) v = std::round(unit(rng) * 40.0) / 40.0;
    std::sort(x.begin(), x.end());
    for (const double r : {0.0, 0.025, 0.1, 0.3, 2.0}) {
      CHECK(pair_fraction_within(x, r) == doctest::Approx(brute_pair_fraction(x, r)).epsilon(1e-14));
    }
  }
}

TEST_CASE("measure samples") {
  const MeasureSample s = sample_measure(cantor(), 200000, 30, {6, 1});
  REQUIRE(s.points.size() == 200000);
  CHECK(s.depth == 30);
  MomentAccumulator m1;
  MomentAccumulator m2;
  for (const double x : s.points) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    m1.add(x);
    m2.add(x * x);
  }
  const auto moments_exact = moments(cantor(), 2);
  CHECK(std::abs(m1.mean() - moments_exact[1]) <= 4.0 * m1.standard_error());
  CHECK(std::abs(m2.mean() - moments_exact[2]) <= 4.0 * m2.standard_error());
  CHECK(sample_measure(cantor(), 1000, 30, {6, 1}).points ==
        sample_measure(cantor(), 1000, 30, {6, 4}).points);
  CHECK_THROWS_AS(sample_measure(cantor(), 1000, 5, {}), Error);
}

TEST_CASE("correlation mass") {
  SUBCASE("Lebesgue: 2 delta - delta^2") {
    for (const double delta : {0.01, 0.1, 0.5}) {
      const McEstimate e = correlation_mass(uniform_halves(), delta, 400000, {8, 1});
      CHECK(std::abs(e.estimate - (2.0 * delta - delta * delta)) <= 4.0 * e.standard_error);
    }
  }
  SUBCASE("monotone in delta for a fixed seed") {
    double previous = 0.0;
    for (const double delta : {0.001, 0.01, 0.05, 0.1, 0.3, 0.7, 1.0}) {
      const McEstimate e = correlation_mass(cantor(), delta, 50000, {3, 1});
      CHECK(e.estimate >= previous);
      previous = e.estimate;
    }
    CHECK(previous == 1.0);
  }
  SUBCASE("arguments") {
    CHECK_THROWS_AS(correlation_mass(cantor(), -0.1, 100, {}), Error);
    CHECK_THROWS_AS(correlation_mass(cantor(), 0.1, 0, {}), Error);
  }
}

TEST_CASE("Holder exponent fit") {
  SUBCASE("Lebesgue: masses 2r - r^2 and alpha near 1") {
    const std::vector<double> radii{0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
    const HolderFit fit = holder_exponent_fit(uniform_halves(), radii, 200000, {5, 1});
    REQUIRE(fit.masses.size() == radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double r = fit.radii[k];
      CHECK(std::abs(fit.masses[k].estimate - (2.0 * r - r * r)) <= 4.0 * fit.masses[k].standard_error);
    }
    CHECK(fit.alpha >= 0.9);
    CHECK(fit.alpha <= 1.05);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      CHECK(fit.masses[k].estimate <= fit.c_constant * std::pow(fit.radii[k], fit.alpha) * (1 + 1e-12));
    }
  }
  SUBCASE("Cantor exponent near log 2 / log 3") {
    std::vector<double> radii;
    for (int k = 1; k <= 8; ++k) radii.push_back(std::pow(3.0, -k));
    const HolderFit fit = holder_exponent_fit(cantor(), radii, 200000, {5, 1});
    CHECK(fit.alpha >= 0.58);
    CHECK(fit.alpha <= 0.68);
  }
  SUBCASE("radii outside (0, width) are rejected") {
    const std::vector<double> bad{0.1, 1.5};
    CHECK_THROWS_AS(holder_exponent_fit(cantor(), bad, 1000, {}), Error);
    const std::vector<double> zero{0.0, 0.1};
    CHECK_THROWS_AS(holder_exponent_fit(cantor(), zero, 1000, {}), Error);
  }
}
