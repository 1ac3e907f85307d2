#include "ssm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ssm/sampler.hpp"

namespace ssm {
namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-2 pi i a b), reducing a*b modulo 1 with the product's rounding error
// recovered by fma; phases at |xi| ~ 1e6 keep ~1e-16 absolute accuracy.
cplx unit_phase(double a, double b) {
  const double q = a * b;
  const double q_err = std::fma(a, b, -q);
  const double frac = (q - std::round(q)) + q_err;
  return std::polar(1.0, -kTwoPi * frac);
}

double taylor_remainder(double radius, int order) {
  // (2 pi radius)^{K+1} / (K+1)!
  return std::exp(static_cast<double>(order + 1) * std::log(kTwoPi * radius) -
                  std::lgamma(static_cast<double>(order + 2)));
}

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace

FourierEvaluator::FourierEvaluator(const IfsSpec& spec, double tolerance, double cutoff,
                                   std::size_t word_cap)
    : spec_(spec), cutoff_(cutoff), word_cap_(word_cap) {
  require(tolerance > 0.0, "Fourier tolerance must be positive");
  require(cutoff > 0.0, "cutoff frequency must be positive");
  if (!spec.normalized()) {
    throw Error(ErrorCode::kNotNormalized, "Fourier evaluation needs a spec normalized to [0,1]");
  }
  while (taylor_remainder(cutoff_, order_) > tolerance) {
    if (++order_ > kMaxTaylorOrder) {
      std::ostringstream os;
      os << "tolerance " << tolerance << " needs Taylor order above " << kMaxTaylorOrder;
      throw Error(ErrorCode::kTolerance, os.str());
    }
  }
  remainder_ = taylor_remainder(cutoff_, order_);
  const std::vector<double> m = moments(spec_, order_);
  coefficients_.resize(static_cast<std::size_t>(order_) + 1);
  cplx power = 1.0;  // (-2 pi i)^k / k!
  for (int k = 0; k <= order_; ++k) {
    if (k > 0) power *= cplx(0.0, -kTwoPi) / static_cast<double>(k);
    coefficients_[static_cast<std::size_t>(k)] = power * m[static_cast<std::size_t>(k)];
  }
}

std::complex<double> FourierEvaluator::taylor(double eta) const {
  cplx acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * eta + *it;
  return acc;
}

FourierEvaluation FourierEvaluator::operator()(double xi) const {
  require(std::isfinite(xi), "frequency must be finite");
  if (xi == 0.0) return {xi, 1.0, 0.0};
  if (std::abs(xi) <= cutoff_) return {xi, taylor(xi), taylor_remainder(std::abs(xi), order_)};

  const double t = std::log(std::abs(xi) / cutoff_);
  double re = 0.0;
  double im = 0.0;
  visit_stopping_words(
      spec_, t,
      [&](const CompositeMap& w, std::size_t) {
        const cplx term = w.weight * unit_phase(xi, w.translation) * taylor(w.ratio * xi);
        re += term.real();
        im += term.imag();
      },
      word_cap_);
  return {xi, cplx(re, im), remainder_};
}

FourierEvaluation fourier_recursive(const IfsSpec& spec, double xi, double tolerance) {
  return FourierEvaluator(spec, tolerance)(xi);
}

ProductEvaluation fourier_product_equal_ratio(const IfsSpec& spec, double xi, int depth) {
  require(depth >= 1, "product depth must be >= 1");
  if (!spec.all_ratios_equal()) {
    throw Error(ErrorCode::kUnequalRatio, "product formula needs all ratios equal");
  }
  const double r = spec.map(0).ratio;
  cplx product = 1.0;
  double eta = xi;
  for (int k = 0; k < depth; ++k) {
    cplx phi = 0.0;
    for (const auto& f : spec.maps()) phi += f.weight * unit_phase(eta, f.translation);
    product *= phi;
    eta *= r;
  }
  // |mu^(eta) - 1| <= 2 pi |eta| int |x| dmu.
  const Interval hull = attractor_hull(spec);
  double abs_moment = std::max(std::abs(hull.low), std::abs(hull.high));
  if (hull.low >= 0.0) {
    double num = 0.0;
    for (const auto& f : spec.maps()) num += f.weight * f.translation;
    abs_moment = num / (1.0 - r);
  }
  return {product, kTwoPi * std::abs(eta) * abs_moment};
}

ComplexEstimate fourier_mc(const IfsSpec& spec, double xi, std::size_t n, std::size_t depth,
                           const McConfig& config) {
  require(n > 0, "Monte Carlo needs at least one sample");
  require(std::pow(spec.max_ratio(), static_cast<double>(depth)) <= 1e-12,
          "sampling depth too small: need r_max^depth <= 1e-12");
  const MeasureSampler sampler(spec, depth);
  struct Partial {
    MomentAccumulator re;
    MomentAccumulator im;
  };
  auto chunks = run_chunks(n, config, [&](std::size_t, std::size_t begin, std::size_t end,
                                          RandomStream& stream) {
    Partial p;
    for (std::size_t i = begin; i < end; ++i) {
      const cplx z = unit_phase(xi, sampler.draw(stream));
      p.re.add(z.real());
      p.im.add(z.imag());
    }
    return p;
  });
  MomentAccumulator re;
  MomentAccumulator im;
  for (const auto& c : chunks) {
    re.merge(c.re);
    im.merge(c.im);
  }
  const double se = std::sqrt((re.variance() + im.variance()) / static_cast<double>(n));
  return {cplx(re.mean(), im.mean()), se};
}

double SpectrumBand::xi_mid() const { return std::sqrt(xi_low * xi_high); }

std::vector<double> band_edges(double xi_min, double xi_max, double bands_per_decade) {
  require(xi_min >= 1.0, "scan bands start at xi >= 1");
  require(xi_max > xi_min, "scan needs xi_max > xi_min");
  require(bands_per_decade > 0.0, "bands per decade must be positive");
  const double span = std::log10(xi_max / xi_min) * bands_per_decade;
  const auto whole = static_cast<std::size_t>(std::floor(span + 1e-9));
  std::vector<double> edges;
  for (std::size_t k = 0; k <= whole; ++k) {
    edges.push_back(xi_min * std::pow(10.0, static_cast<double>(k) / bands_per_decade));
  }
  if (span - static_cast<double>(whole) > 1e-9) edges.push_back(xi_max);
  return edges;
}

SpectrumScan scan_bands(const IfsSpec& spec, std::span<const double> edges,
                        std::size_t samples_per_band, double tolerance, const McConfig& config) {
  require(edges.size() >= 2, "scan needs at least one band");
  require(samples_per_band >= 2, "scan needs at least two samples per band");
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    require(edges[k] >= 1.0 && edges[k + 1] > edges[k], "band edges must increase from xi >= 1");
  }
  const FourierEvaluator evaluate(spec, tolerance);
  const std::size_t grid = (samples_per_band + 1) / 2;
  const std::size_t jitter = samples_per_band - grid;

  SpectrumScan scan;
  scan.bands.resize(edges.size() - 1);
  parallel_for_chunks(scan.bands.size(), config.workers, [&](std::size_t k) {
    const double lo = edges[k];
    const double hi = edges[k + 1];
    const double log_ratio = std::log(hi / lo);
    RandomStream stream(config.seed, k);
    double sup = 0.0;
    auto probe = [&](double xi) { sup = std::max(sup, std::abs(evaluate(xi).value)); };
    for (std::size_t i = 0; i < grid; ++i) {
      const double frac = grid == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(grid - 1);
      probe(lo * std::exp(frac * log_ratio));
    }
    for (std::size_t i = 0; i < jitter; ++i) probe(lo * std::exp(stream.uniform() * log_ratio));
    scan.bands[k] = SpectrumBand{lo, hi, sup, samples_per_band};
  });
  return scan;
}

SpectrumScan spectrum_scan(const IfsSpec& spec, const ScanOptions& options, const McConfig& config) {
  const auto edges = band_edges(options.xi_min, options.xi_max, options.bands_per_decade);
  return scan_bands(spec, edges, options.samples_per_band, options.tolerance, config);
}

DecayFit fit_log_decay(const SpectrumScan& scan) {
  const double threshold = std::exp(2.0);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& band : scan.bands) {
    if (band.xi_low < threshold || !(band.sup_abs > 0.0)) continue;
    xs.push_back(std::log(std::log(band.xi_mid())));
    ys.push_back(std::log(band.sup_abs));
  }
  if (xs.size() < 5) {
    throw Error(ErrorCode::kInsufficientBands,
                "decay fit needs >= 5 bands with xi_low >= e^2, got " + std::to_string(xs.size()));
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
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    sse += e * e;
  }
  return {-slope, intercept, std::sqrt(sse / n), xs.size()};
}

IdentityResidual stopping_sum_identity(const IfsSpec& spec, double s, double t, double x, double y) {
  using ld = long double;
  using lcplx = std::complex<ld>;
  const ld two_pi = 2.0L * std::numbers::pi_v<long double>;
  const ld scale = static_cast<ld>(s) * std::exp(static_cast<ld>(t));
  const ld gap = static_cast<ld>(s) * (static_cast<ld>(x) - static_cast<ld>(y));
  lcplx lhs = 0.0L;
  lcplx rhs = 0.0L;
  visit_stopping_words(spec, t, [&](const CompositeMap& w, std::size_t) {
    const ld r = w.ratio;
    const ld b = w.translation;
    const ld diff = (r * x + b) - (r * y + b);
    lhs += static_cast<ld>(w.weight) * std::polar(1.0L, -two_pi * scale * diff);
    const ld shifted = -std::log(r) - static_cast<ld>(t);  // -log r_w - t
    rhs += static_cast<ld>(w.weight) * std::polar(1.0L, -two_pi * gap * std::exp(-shifted));
  });
  const cplx l(static_cast<double>(lhs.real()), static_cast<double>(lhs.imag()));
  const cplx r(static_cast<double>(rhs.real()), static_cast<double>(rhs.imag()));
  return {l, r, static_cast<double>(std::abs(lhs - rhs))};
}

DoubleSumEstimate double_sum_bound(const IfsSpec& spec, double xi, double t, std::size_t pairs,
                                   const McConfig& config) {
  require(pairs > 0, "double sum needs at least one pair");
  // The inner sum only sees r_w; collapse W_t to distinct ratios.
  std::vector<std::pair<double, double>> ratios;
  visit_stopping_words(spec, t, [&](const CompositeMap& w, std::size_t) {
    ratios.emplace_back(w.ratio, w.weight);
  });
  std::sort(ratios.begin(), ratios.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& [r, p] : ratios) {
    if (!merged.empty() && r - merged.back().first <= 1e-12 * r) {
      merged.back().second += p;
    } else {
      merged.emplace_back(r, p);
    }
  }

  const MeasureSampler sampler(spec, MeasureSampler::depth_for(spec, 1e-12));
  struct Partial {
    MomentAccumulator re;
    MomentAccumulator im;
  };
  auto chunks = run_chunks(pairs, config, [&](std::size_t, std::size_t begin, std::size_t end,
                                              RandomStream& stream) {
    Partial p;
    for (std::size_t i = begin; i < end; ++i) {
      const double d = sampler.draw(stream) - sampler.draw(stream);
      cplx inner = 0.0;
      for (const auto& [r, w] : merged) inner += w * unit_phase(xi * r, d);
      p.re.add(inner.real());
      p.im.add(inner.imag());
    }
    return p;
  });
  MomentAccumulator re;
  MomentAccumulator im;
  for (const auto& c : chunks) {
    re.merge(c.re);
    im.merge(c.im);
  }
  return {re.mean(), re.standard_error(), im.mean(), im.standard_error()};
}

std::complex<double> oscillation_integral(const StepDistribution& dist, double s) {
  require(std::isfinite(s), "oscillation integral needs a finite s");
  if (s == 0.0) return 1.0;
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  const LimitOvershootLaw law(dist);
  const auto breaks = law.breakpoints();
  // One Kronrod rule per half-wavelength panel in u.
  const double panel = 0.5 / std::abs(s);
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 1; k < breaks.size(); ++k) {
    const double height = law.tail(breaks[k - 1]);
    const double a = std::exp(-breaks[k]);
    const double b = std::exp(-breaks[k - 1]);
    const auto panels = static_cast<std::size_t>(std::ceil((b - a) / panel));
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t i = 0; i < panels; ++i) {
      const double lo = a + h * static_cast<double>(i);
      const double hi = i + 1 == panels ? b : lo + h;
      re += height * Quadrature::integrate(
                         [&](double u) { return std::cos(kTwoPi * s * u) / u; }, lo, hi, 0);
      im -= height * Quadrature::integrate(
                         [&](double u) { return std::sin(kTwoPi * s * u) / u; }, lo, hi, 0);
    }
  }
  return cplx(re, im) / dist.mean();
}

}  // namespace ssm
