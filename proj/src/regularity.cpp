#include "ssm/regularity.hpp"

#include <algorithm>
#include <cmath>

#include "ssm/sampler.hpp"

namespace ssm {
namespace {

constexpr std::size_t kBatches = 16;

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace

MeasureSample sample_measure(const IfsSpec& spec, std::size_t n, std::size_t depth,
                             const McConfig& config) {
  require(std::pow(spec.max_ratio(), static_cast<double>(depth)) <= 1e-10,
          "sampling depth too small: need r_max^depth <= 1e-10");
  const MeasureSampler sampler(spec, depth);
  auto chunks = run_chunks(n, config, [&](std::size_t, std::size_t begin, std::size_t end,
                                          RandomStream& stream) {
    std::vector<double> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(sampler.draw(stream));
    return out;
  });
  MeasureSample sample{{}, depth, config.seed};
  sample.points.reserve(n);
  for (const auto& c : chunks) sample.points.insert(sample.points.end(), c.begin(), c.end());
  return sample;
}

double pair_fraction_within(std::span<const double> sorted, double radius) {
  const std::size_t n = sorted.size();
  if (n < 2) return 0.0;
  std::uint64_t close = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    hi = std::max(hi, i + 1);
    while (hi < n && sorted[hi] - sorted[i] <= radius) ++hi;
    close += hi - i - 1;
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(close) / pairs;
}

HolderFit holder_fit_from_sample(const MeasureSample& sample, std::span<const double> radii) {
  require(radii.size() >= 2, "Holder fit needs at least two radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    require(radii[k] > 0.0, "radii must be positive");
    require(k == 0 || radii[k] < radii[k - 1], "radii must be decreasing");
  }
  require(sample.points.size() >= 2 * kBatches, "Holder fit needs more sample points");

  std::vector<double> all = sample.points;
  std::sort(all.begin(), all.end());
  // Batches are contiguous runs of the i.i.d. sample; their spread gives the
  // standard error of the full U-statistic.
  std::vector<std::vector<double>> batches(kBatches);
  const std::size_t per = sample.points.size() / kBatches;
  for (std::size_t b = 0; b < kBatches; ++b) {
    batches[b].assign(sample.points.begin() + static_cast<std::ptrdiff_t>(b * per),
                      sample.points.begin() + static_cast<std::ptrdiff_t>((b + 1) * per));
    std::sort(batches[b].begin(), batches[b].end());
  }

  HolderFit fit;
  fit.radii.assign(radii.begin(), radii.end());
  std::vector<double> xs;
  std::vector<double> ys;
  for (const double r : radii) {
    MomentAccumulator spread;
    for (const auto& batch : batches) spread.add(pair_fraction_within(batch, r));
    const double mass = pair_fraction_within(all, r);
    fit.masses.push_back({mass, spread.standard_error()});
    require(mass > 0.0, "no sampled pair within the smallest radius; increase N or the radius");
    xs.push_back(std::log(r));
    ys.push_back(std::log(mass));
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.alpha = sxy / sxx;
  fit.intercept = my - fit.alpha * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.alpha * xs[i]);
    sse += e * e;
    fit.c_constant = std::max(fit.c_constant, fit.masses[i].estimate / std::pow(radii[i], fit.alpha));
  }
  fit.residual = std::sqrt(sse / n);
  return fit;
}

HolderFit holder_exponent_fit(const IfsSpec& spec, std::span<const double> radii, std::size_t n,
                              const McConfig& config) {
  const double width = attractor_hull(spec).width();
  for (const double r : radii) require(r > 0.0 && r < width, "radii must lie in (0, hull width)");
  const MeasureSample sample = sample_measure(spec, n, MeasureSampler::depth_for(spec, 1e-10), config);
  return holder_fit_from_sample(sample, radii);
}

McEstimate correlation_mass(const IfsSpec& spec, double delta, std::size_t n,
                            const McConfig& config) {
  require(delta > 0.0, "delta must be positive");
  require(n > 0, "correlation mass needs at least one pair");
  const MeasureSampler sampler(spec, MeasureSampler::depth_for(spec, 1e-10));
  auto chunks = run_chunks(n, config, [&](std::size_t, std::size_t begin, std::size_t end,
                                          RandomStream& stream) {
    std::size_t close = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double x = sampler.draw(stream);
      const double y = sampler.draw(stream);
      if (std::abs(x - y) <= delta) ++close;
    }
    return close;
  });
  std::size_t close = 0;
  for (const auto c : chunks) close += c;
  const double p = static_cast<double>(close) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace ssm
