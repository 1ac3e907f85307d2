#pragma once

// Fourier transform mu^(xi) = int exp(-2 pi i xi x) dmu(x) of self-similar
// measures: a certified evaluator built on stopping word sets, two independent
// oracles, frequency scans and decay fits, and the exponential-sum identities
// behind the decay mechanism.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ssm/ifs.hpp"
#include "ssm/random.hpp"
#include "ssm/walk.hpp"

namespace ssm {

inline constexpr double kDefaultCutoffFrequency = 0.25;
inline constexpr int kMaxTaylorOrder = 60;

struct FourierEvaluation {
  double frequency = 0.0;
  std::complex<double> value;
  double error_bound = 0.0;
};

// Evaluates mu^ by one expansion mu^(xi) = sum_{w in W_t} p_w e^{-2 pi i xi b_w} mu^(r_w xi)
// with t = max(0, log(|xi| / xi_0)), then a Taylor series in the moments for each
// tail, whose arguments satisfy |r_w xi| <= xi_0. Needs supp mu in [0, 1].
class FourierEvaluator {
 public:
  FourierEvaluator(const IfsSpec& spec, double tolerance, double cutoff = kDefaultCutoffFrequency,
                   std::size_t word_cap = kDefaultWordCap);

  FourierEvaluation operator()(double xi) const;

  int taylor_order() const { return order_; }
  double remainder_bound() const { return remainder_; }

 private:
  std::complex<double> taylor(double eta) const;

  IfsSpec spec_;
  double cutoff_;
  std::size_t word_cap_;
  int order_ = 0;
  double remainder_ = 0.0;
  std::vector<std::complex<double>> coefficients_;  // (-2 pi i)^k m_k / k!
};

FourierEvaluation fourier_recursive(const IfsSpec& spec, double xi, double tolerance);

struct ProductEvaluation {
  std::complex<double> value;
  double tail_bound = 0.0;
};

// prod_{k < depth} phi(r^k xi), phi(xi) = sum_j p_j e^{-2 pi i xi b_j}, for
// specs whose ratios are all equal to r.
ProductEvaluation fourier_product_equal_ratio(const IfsSpec& spec, double xi, int depth);

struct ComplexEstimate {
  std::complex<double> value;
  double standard_error = 0.0;  // of the complex mean, sqrt(E|Z - EZ|^2 / N)
};

ComplexEstimate fourier_mc(const IfsSpec& spec, double xi, std::size_t n, std::size_t depth,
                           const McConfig& config);

struct SpectrumBand {
  double xi_low = 0.0;
  double xi_high = 0.0;
  double sup_abs = 0.0;  // sampled lower bound on sup |mu^| over the band
  std::size_t samples = 0;

  double xi_mid() const;  // geometric midpoint
};

struct SpectrumScan {
  std::vector<SpectrumBand> bands;
};

struct ScanOptions {
  double xi_min = 16.0;
  double xi_max = 1e6;
  double bands_per_decade = 5.0;
  std::size_t samples_per_band = 32;  // half log-spaced grid, half jitter
  double tolerance = 1e-10;
};

// Logarithmic band edges xi_min * 10^{k / bands_per_decade} up to xi_max.
std::vector<double> band_edges(double xi_min, double xi_max, double bands_per_decade);

SpectrumScan spectrum_scan(const IfsSpec& spec, const ScanOptions& options, const McConfig& config);

SpectrumScan scan_bands(const IfsSpec& spec, std::span<const double> edges,
                        std::size_t samples_per_band, double tolerance, const McConfig& config);

struct DecayFit {
  double beta = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS
  std::size_t bands_used = 0;
};

// Least squares of log sup against log log xi_mid over bands with
// xi_low >= e^2; beta is the negated slope.
DecayFit fit_log_decay(const SpectrumScan& scan);

struct IdentityResidual {
  std::complex<double> lhs;
  std::complex<double> rhs;
  double residual = 0.0;
};

// sum_{w in W_t} p_w e^{-2 pi i s e^t (f_w(x) - f_w(y))} against
// sum_{w in W_t} p_w g_{s(x-y)}(-log r_w - t), g_a(r) = exp(-2 pi i a e^{-r}).
IdentityResidual stopping_sum_identity(const IfsSpec& spec, double s, double t, double x, double y);

struct DoubleSumEstimate {
  double estimate = 0.0;  // real part
  double standard_error = 0.0;
  double imaginary = 0.0;
  double imaginary_standard_error = 0.0;
};

// Monte Carlo over independent (x, y) ~ mu x mu of the exact inner sum
// sum_{w in W_t} p_w e^{-2 pi i xi r_w (x - y)}.
DoubleSumEstimate double_sum_bound(const IfsSpec& spec, double xi, double t, std::size_t pairs,
                                   const McConfig& config);

// (1/sigma) int_0^inf exp(-2 pi i s e^{-r}) p(r) dr.
std::complex<double> oscillation_integral(const StepDistribution& dist, double s);

}  // namespace ssm
