#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "ssm/spectral.hpp"

using namespace ssm;
using ssm::testing::cantor;
using ssm::testing::half_third;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Lebesgue measure on [0,1].
cplx uniform_transform(double xi) {
  if (xi == 0.0) return 1.0;
  const cplx z(0.0, -2.0 * kPi * xi);
  return (std::exp(z) - 1.0) / z;
}

// E1(z) = int_z^inf e^{-w}/w dw for Re z >= 0, z != 0: power series for small
// |z|, modified Lentz continued fraction otherwise.
std::complex<long double> exp_integral_e1(std::complex<long double> z) {
  using lcplx = std::complex<long double>;
  if (std::abs(z) <= 2.0L) {
    const long double euler = 0.577215664901532860606512090082402431L;
    lcplx sum = 0.0L;
    lcplx term = 1.0L;
    for (int n = 1; n < 200; ++n) {
      term *= -z / static_cast<long double>(n);
      sum += term / static_cast<long double>(n);
      if (std::abs(term) < 1e-22L) break;
    }
    return -euler - std::log(z) - sum;
  }
  // E1(z) = e^{-z} / (z + 1/(1 + 1/(z + 2/(1 + 2/(z + ...))))), in the even form
  // e^{-z} (1/(z+1-) 1^2/(z+3-) 2^2/(z+5-) ...).
  const long double tiny = 1e-300L;
  lcplx b = z + 1.0L;
  lcplx c = 1.0L / tiny;
  lcplx d = 1.0L / b;
  lcplx h = d;
  for (int i = 1; i < 100000; ++i) {
    const long double a = -static_cast<long double>(i) * static_cast<long double>(i);
    b += 2.0L;
    d = 1.0L / (a * d + b);
    c = b + a / c;
    const lcplx delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0L) < 1e-20L) break;
  }
  return h * std::exp(-z);
}

// (1/sigma) sum_j p_j int_{e^{-x_j}}^1 e^{-2 pi i s u} du / u.
cplx oscillation_oracle(const StepDistribution& d, double s) {
  std::complex<long double> total = 0.0L;
  const long double k = 2.0L * std::numbers::pi_v<long double> * s;
  for (const auto& a : d.atoms()) {
    const std::complex<long double> lo(0.0L, k * std::exp(-static_cast<long double>(a.step)));
    const std::complex<long double> hi(0.0L, k);
    total += static_cast<long double>(a.weight) * (exp_integral_e1(lo) - exp_integral_e1(hi));
  }
  return cplx(total / static_cast<long double>(d.mean()));
}

}  // namespace

TEST_CASE("certified evaluator against Lebesgue measure") {
  const FourierEvaluator mu(ssm::testing::uniform_halves(), 1e-12);
  for (const double xi : {0.0, 0.1, 0.25, 0.3, 1.0, 2.5, 17.3, 1000.125, 12345.678}) {
    const FourierEvaluation e = mu(xi);
    CHECK(std::abs(e.value - uniform_transform(xi)) <= 1e-11);
    CHECK(e.error_bound <= 1e-12);
  }
}

TEST_CASE("Cantor transform") {
  const IfsSpec spec = cantor();
  const FourierEvaluator mu(spec, 1e-12);
  SUBCASE("product oracle") {
    for (const double xi : {0.7, 3.0, 11.11, 243.0, 1000.0, 54321.0}) {
      const ProductEvaluation p = fourier_product_equal_ratio(spec, xi, 80);
      CHECK(p.tail_bound <= 1e-14);
      CHECK(std::abs(mu(xi).value - p.value) <= 1e-11);
    }
  }
  SUBCASE("closed form at powers of three") {
    double prod = 1.0;
    for (int k = 1; k < 60; ++k) prod *= std::cos(2.0 * kPi / std::pow(3.0, k));
    for (int m = 0; m <= 9; ++m) {
      const double xi = std::pow(3.0, m);
      CHECK(std::abs(mu(xi).value - cplx(-prod, 0.0)) <= 1e-11);
      const ProductEvaluation p = fourier_product_equal_ratio(spec, xi, 80);
      CHECK(std::abs(p.value - cplx(-prod, 0.0)) <= 1e-11);
    }
  }
  SUBCASE("product oracle needs equal ratios") {
    try {
      fourier_product_equal_ratio(half_third(), 10.0, 40);
      FAIL("expected UnequalRatioError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnequalRatio);
    }
  }
}

TEST_CASE("structural identities of mu^") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> freq(-3000.0, 3000.0);
  for (int trial = 0; trial < 8; ++trial) {
    const IfsSpec spec = ssm::testing::random_spec(rng);
    const FourierEvaluator mu(spec, 1e-12);
    for (int k = 0; k < 10; ++k) {
      const double xi = freq(rng);
      const cplx at = mu(xi).value;
      CHECK(std::abs(at) <= 1.0 + 1e-12);
      // Hermitian symmetry.
      CHECK(std::abs(mu(-xi).value - std::conj(at)) <= 1e-11);
      // One-step self-similarity.
      cplx rhs = 0.0;
      for (const auto& f : spec.maps()) {
        rhs += f.weight * std::polar(1.0, -2.0 * kPi * xi * f.translation) * mu(f.ratio * xi).value;
      }
      CHECK(std::abs(at - rhs) <= 1e-11);
      CHECK(std::abs(fourier_recursive(spec, xi, 1e-12).value - at) <= 1e-15);
    }
  }
}

TEST_CASE("evaluator against the Monte Carlo oracle") {
  const IfsSpec spec = half_third();
  const FourierEvaluator mu(spec, 1e-12);
  for (const double xi : {1.5, 40.0, 900.0}) {
    const ComplexEstimate mc = fourier_mc(spec, xi, 400000, 40, {5, 1});
    CHECK(std::abs(mc.value - mu(xi).value) <= 4.0 * mc.standard_error);
  }
  CHECK_THROWS_AS(fourier_mc(spec, 1.0, 100, 5, {}), Error);
}

TEST_CASE("evaluator errors") {
  const IfsSpec raw =
      validate_ifs(std::vector<SimilitudeMap>{{0.5, 0.0, 0.5}, {0.5, 5.0, 0.5}});
  CHECK_THROWS_AS(FourierEvaluator(raw, 1e-10), Error);
  const FourierEvaluator tight(cantor(), 1e-16);
  CHECK(tight.taylor_order() <= kMaxTaylorOrder);
  CHECK(tight.remainder_bound() <= 1e-16);
  try {
    FourierEvaluator(cantor(), 1e-300);
    FAIL("expected ToleranceError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTolerance);
  }
  const FourierEvaluator capped(cantor(), 1e-10, kDefaultCutoffFrequency, 100);
  CHECK_THROWS_AS(capped(1e6), ExplosionError);
}

TEST_CASE("spectrum scans") {
  SUBCASE("band edges") {
    const auto edges = band_edges(16.0, 1e6, 5.0);
    CHECK(edges.front() == 16.0);
    CHECK(edges.back() <= 1e6 * (1 + 1e-12));
    for (std::size_t k = 1; k + 1 < edges.size(); ++k) {
      CHECK(edges[k] / edges[k - 1] == doctest::Approx(std::pow(10.0, 0.2)));
    }
  }
  SUBCASE("scan is deterministic across workers and bounded") {
    ScanOptions options;
    options.xi_max = 2e3;
    options.samples_per_band = 16;
    const SpectrumScan a = spectrum_scan(half_third(), options, {11, 1});
    const SpectrumScan b = spectrum_scan(half_third(), options, {11, 3});
    REQUIRE(a.bands.size() == b.bands.size());
    const FourierEvaluator mu(half_third(), 1e-10);
    for (std::size_t k = 0; k < a.bands.size(); ++k) {
      CHECK(a.bands[k].sup_abs == b.bands[k].sup_abs);
      CHECK(a.bands[k].samples == 16);
      CHECK(a.bands[k].sup_abs <= 1.0);
      // The left edge is one of the log-grid samples.
      CHECK(a.bands[k].sup_abs >= std::abs(mu(a.bands[k].xi_low).value) - 1e-9);
    }
  }
  SUBCASE("Cantor bands containing 3^k do not decay") {
    // |mu^(3^k)| = prod_k |cos(2 pi / 3^k)| = 0.3714...; band samples land near 3^k.
    const std::vector<double> edges{240.0, 250.0, 2180.0, 2200.0};
    const SpectrumScan s = scan_bands(cantor(), edges, 64, 1e-10, {});
    CHECK(s.bands[0].sup_abs >= 0.36);
    CHECK(s.bands[2].sup_abs >= 0.36);
  }
}

TEST_CASE("log decay fit recovers a planted exponent") {
  SpectrumScan scan;
  for (const double lo : band_edges(16.0, 1e8, 5.0)) {
    SpectrumBand b{lo, lo * std::pow(10.0, 0.2), 0.0, 1};
    b.sup_abs = 0.8 * std::pow(std::log(b.xi_mid()), -0.7);
    scan.bands.push_back(b);
  }
  const DecayFit fit = fit_log_decay(scan);
  CHECK(fit.beta == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(fit.intercept == doctest::Approx(std::log(0.8)).epsilon(1e-10));
  CHECK(fit.residual <= 1e-10);
  for (const auto& b : scan.bands) {
    if (b.xi_low < std::exp(2.0)) CHECK(fit.bands_used < scan.bands.size());
  }
  SpectrumScan few;
  few.bands.assign(scan.bands.begin(), scan.bands.begin() + 4);
  try {
    fit_log_decay(few);
    FAIL("expected InsufficientBandsError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientBands);
  }
}

TEST_CASE("stopping-sum identity holds exactly") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const IfsSpec& spec : {half_third(), cantor(), ssm::testing::random_spec(rng)}) {
    for (int k = 0; k < 10; ++k) {
      const double s = 100.0 * unit(rng);
      const double t = 1.0 + 6.0 * unit(rng);
      const IdentityResidual r = stopping_sum_identity(spec, s, t, unit(rng), unit(rng));
      CHECK(r.residual <= 1e-12);
      CHECK(std::abs(r.lhs) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("double sum equals sum_w p_w |mu^(r_w xi)|^2 in mean") {
  const IfsSpec spec = half_third();
  const FourierEvaluator mu(spec, 1e-12);
  for (const double xi : {50.0, 400.0}) {
    const double t = 3.0;
    double oracle = 0.0;
    for (const auto& e : enumerate_stopping_words(spec, t).entries) {
      oracle += e.map.weight * std::norm(mu(e.map.ratio * xi).value);
    }
    const DoubleSumEstimate est = double_sum_bound(spec, xi, t, 200000, {2, 1});
    CHECK(std::abs(est.estimate - oracle) <= 4.0 * est.standard_error);
    CHECK(std::abs(est.imaginary) <= 4.0 * est.imaginary_standard_error);
  }
}

TEST_CASE("oscillation integral against the exponential integral") {
  for (const auto& d : {step_distribution(half_third()), step_distribution(cantor())}) {
    CHECK(std::abs(oscillation_integral(d, 0.0) - 1.0) <= 1e-12);
    for (const double s : {0.3, 1.0, 10.0, 100.0, 1000.0, 10000.0}) {
      const cplx got = oscillation_integral(d, s);
      const cplx want = oscillation_oracle(d, s);
      CHECK(std::abs(got - want) <= 1e-9);
    }
  }
}
