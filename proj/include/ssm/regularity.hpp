#pragma once

// Empirical access to mu: i.i.d. samples, pair-counting estimates of the
// correlation mass (mu x mu)(|x - y| <= delta) and of the correlation exponent
// alpha in E_mu[mu(B(x, r))] ~ C r^alpha.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ssm/ifs.hpp"
#include "ssm/random.hpp"
#include "ssm/walk.hpp"

namespace ssm {

struct MeasureSample {
  std::vector<double> points;
  std::size_t depth = 0;
  std::uint64_t seed = 0;
};

MeasureSample sample_measure(const IfsSpec& spec, std::size_t n, std::size_t depth,
                             const McConfig& config);

// Fraction of unordered pairs {i, j}, i != j, with |x_i - x_j| <= radius.
// `sorted` must be ascending.
double pair_fraction_within(std::span<const double> sorted, double radius);

struct HolderFit {
  // Correlation exponent: slope of log E_mu[mu(B(x, r))] against log r.
  double alpha = 0.0;
  // Smallest C with mass(r) <= C r^alpha on the fitted radii.
  double c_constant = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  std::vector<double> radii;
  std::vector<McEstimate> masses;
};

HolderFit holder_fit_from_sample(const MeasureSample& sample, std::span<const double> radii);

HolderFit holder_exponent_fit(const IfsSpec& spec, std::span<const double> radii, std::size_t n,
                              const McConfig& config);

// (mu x mu)(A_delta) from n independent pairs.
McEstimate correlation_mass(const IfsSpec& spec, double delta, std::size_t n,
                            const McConfig& config);

}  // namespace ssm
