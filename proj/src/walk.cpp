#include "ssm/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ssm {
namespace {

using cplx = std::complex<double>;

cplx one_minus_laplace_i(const StepDistribution& dist, double b) {
  cplx s = 0.0;
  for (const auto& a : dist.atoms()) s += a.weight * std::polar(1.0, -b * a.step);
  return 1.0 - s;
}

// d/db of 1 - L(ib).
cplx one_minus_laplace_i_derivative(const StepDistribution& dist, double b) {
  cplx s = 0.0;
  for (const auto& a : dist.atoms()) s += a.weight * cplx(0.0, a.step) * std::polar(1.0, -b * a.step);
  return s;
}

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace

StepDistribution StepDistribution::from_atoms(std::vector<StepAtom> atoms) {
  require(!atoms.empty(), "step distribution needs at least one atom");
  for (const auto& a : atoms) {
    require(std::isfinite(a.step) && a.step > 0.0, "steps must be positive");
    require(std::isfinite(a.weight) && a.weight > 0.0, "step weights must be positive");
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const StepAtom& a, const StepAtom& b) { return a.step < b.step; });
  StepDistribution dist;
  for (const auto& a : atoms) {
    if (!dist.atoms_.empty() && a.step - dist.atoms_.back().step <= kAtomMergeTolerance) {
      auto& merged = dist.atoms_.back();
      merged.weight += a.weight;
      merged.source = std::min(merged.source, a.source);
    } else {
      dist.atoms_.push_back(a);
    }
  }
  const double total = dist.total_weight();
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "step weights sum to " << total << ", expected 1";
    throw Error(ErrorCode::kWeightSum, os.str());
  }
  std::vector<double> weights;
  for (const auto& a : dist.atoms_) {
    weights.push_back(a.weight);
    dist.mean_ += a.weight * a.step;
    dist.second_moment_ += a.weight * a.step * a.step;
    dist.third_moment_ += a.weight * a.step * a.step * a.step;
  }
  dist.cumulative_ = cumulative_weights(weights);
  return dist;
}

double StepDistribution::total_weight() const {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.weight;
  return total;
}

StepDistribution step_distribution(const IfsSpec& spec) {
  std::vector<StepAtom> atoms;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    atoms.push_back({-std::log(spec.map(j).ratio), spec.map(j).weight, j});
  }
  return StepDistribution::from_atoms(std::move(atoms));
}

ResidueSample sample_stopping(const StepDistribution& dist, double t, RandomStream& stream) {
  double position = 0.0;
  double previous = 0.0;
  double step = 0.0;
  std::size_t n = 0;
  do {
    previous = position;
    step = dist.draw(stream);
    position += step;
    ++n;
  } while (position < t);
  return ResidueSample{n, position - t, step, t - previous};
}

std::vector<double> sample_overshoots(const StepDistribution& dist, double t, std::size_t n,
                                      const McConfig& config) {
  auto chunks = run_chunks(n, config, [&](std::size_t, std::size_t begin, std::size_t end,
                                          RandomStream& stream) {
    std::vector<double> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(sample_stopping(dist, t, stream).overshoot);
    return out;
  });
  std::vector<double> all;
  all.reserve(n);
  for (const auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  return all;
}

LimitOvershootLaw::LimitOvershootLaw(const StepDistribution& dist) : sigma_(dist.mean()) {
  breakpoints_.push_back(0.0);
  double remaining = dist.total_weight();
  for (const auto& a : dist.atoms()) {
    breakpoints_.push_back(a.step);
    tails_.push_back(remaining);
    remaining -= a.weight;
  }
}

double LimitOvershootLaw::tail(double x) const {
  if (x < 0.0) return 1.0;
  for (std::size_t k = 0; k < tails_.size(); ++k) {
    if (x < breakpoints_[k + 1]) return tails_[k];
  }
  return 0.0;
}

double LimitOvershootLaw::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  double area = 0.0;
  for (std::size_t k = 0; k < tails_.size(); ++k) {
    const double lo = breakpoints_[k];
    const double hi = breakpoints_[k + 1];
    if (x <= hi) {
      area += tails_[k] * (x - lo);
      return std::min(1.0, area / sigma_);
    }
    area += tails_[k] * (hi - lo);
  }
  return 1.0;
}

double LimitOvershootLaw::total_mass() const {
  double area = 0.0;
  for (std::size_t k = 0; k < tails_.size(); ++k) {
    area += tails_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
  }
  return area / sigma_;
}

double LimitOvershootLaw::mean_overshoot() const {
  double integral = 0.0;
  for (std::size_t k = 0; k < tails_.size(); ++k) {
    const double lo = breakpoints_[k];
    const double hi = breakpoints_[k + 1];
    integral += tails_[k] * 0.5 * (hi * hi - lo * lo);
  }
  return integral / sigma_;
}

double overshoot_cdf_limit(const LimitOvershootLaw& law, double x) {
  require(x >= 0.0, "overshoot CDF is defined for x >= 0");
  return law.cdf(x);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), "KS statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    // Ties share one jump of the empirical CDF.
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f = cdf(samples[i]);
    d = std::max({d, std::abs(static_cast<double>(j) / n - f), std::abs(f - static_cast<double>(i) / n)});
    i = j;
  }
  return d;
}

std::vector<HistogramBin> overshoot_histogram(std::span<const double> overshoots,
                                              const LimitOvershootLaw& law, std::size_t bins) {
  require(bins > 0, "histogram needs at least one bin");
  const double top = law.breakpoints().back();
  const double width = top / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (const double x : overshoots) {
    auto k = static_cast<std::size_t>(std::max(0.0, x) / width);
    counts[std::min(k, bins - 1)]++;
  }
  std::vector<HistogramBin> out;
  out.reserve(bins);
  const double n = static_cast<double>(std::max<std::size_t>(overshoots.size(), 1));
  for (std::size_t k = 0; k < bins; ++k) {
    const double left = width * static_cast<double>(k);
    const double right = k + 1 == bins ? top : width * static_cast<double>(k + 1);
    out.push_back({left, right, static_cast<double>(counts[k]) / n, law.cdf(right) - law.cdf(left)});
  }
  return out;
}

SupportedFunction indicator(double low, double high) {
  return SupportedFunction{[low, high](double x) { return (x >= low && x <= high) ? 1.0 : 0.0; },
                           low, high};
}

McEstimate renewal_operator_mc(const StepDistribution& dist, const SupportedFunction& f, double t,
                               std::size_t n, const McConfig& config) {
  require(n > 0, "renewal estimate needs at least one trajectory");
  const double stop = t + f.support_high;
  auto chunks = run_chunks(n, config, [&](std::size_t, std::size_t begin, std::size_t end,
                                          RandomStream& stream) {
    MomentAccumulator acc;
    for (std::size_t i = begin; i < end; ++i) {
      double position = 0.0;
      double total = f(-t);
      for (;;) {
        position += dist.draw(stream);
        if (position > stop) break;
        total += f(position - t);
      }
      acc.add(total);
    }
    return acc;
  });
  MomentAccumulator all;
  for (const auto& c : chunks) all.merge(c);
  return {all.mean(), all.standard_error()};
}

double renewal_operator_exact(const StepDistribution& dist, const SupportedFunction& f, double t,
                              std::size_t node_cap) {
  const auto atoms = dist.atoms();
  const std::size_t m = atoms.size();
  const double stop = t + f.support_high;

  // Multisets of steps are enumerated once each by only appending atoms with
  // index >= the last appended one. Multinomial weight updates on append:
  // P(k + e_j) = P(k) * p_j * (n + 1) / (k_j + 1).
  struct Frame {
    double probability;
    std::size_t length;
    std::size_t last;
    std::size_t next;
  };
  std::vector<std::size_t> counts(m, 0);
  auto position = [&] {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += static_cast<double>(counts[j]) * atoms[j].step;
    return s;
  };

  double total = f(-t);
  std::size_t nodes = 1;
  std::vector<Frame> stack{Frame{1.0, 0, 0, 0}};
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == m) {
      if (stack.size() > 1) --counts[top.last];
      stack.pop_back();
      continue;
    }
    const std::size_t j = top.next++;
    const double p = top.probability * atoms[j].weight * static_cast<double>(top.length + 1) /
                     static_cast<double>(counts[j] + 1);
    ++counts[j];
    const double s = position();
    if (s > stop) {
      // Larger atoms only move further right.
      --counts[j];
      top.next = m;
      continue;
    }
    if (++nodes > node_cap) {
      std::ostringstream os;
      os << "renewal enumeration exceeds " << node_cap << " nodes";
      throw ExplosionError(os.str(), static_cast<double>(nodes));
    }
    total += p * f(s - t);
    stack.push_back(Frame{p, top.length + 1, j, j});
  }
  return total;
}

CutoffMass cutoff_mass(const StepDistribution& dist, double t, std::size_t n,
                       const McConfig& config) {
  require(t >= 0.0, "cutoff mass is defined for t >= 0");
  require(n > 0, "cutoff mass needs at least one trajectory");
  auto chunks = run_chunks(n, config, [&](std::size_t, std::size_t begin, std::size_t end,
                                          RandomStream& stream) {
    MomentAccumulator acc;
    for (std::size_t i = begin; i < end; ++i) {
      double position = 0.0;
      std::size_t crossings = 0;
      for (std::size_t k = 0;; ++k) {
        const double step = dist.draw(stream);
        const double next = position + step;
        // S_0 = 0 counts as below t = 0 so that n_t >= 1.
        const bool below = k == 0 ? position <= t : position < t;
        if (below && t <= next) ++crossings;
        position = next;
        if (position >= t) break;
      }
      acc.add(static_cast<double>(crossings));
    }
    return acc;
  });
  MomentAccumulator all;
  for (const auto& c : chunks) all.merge(c);
  return {all.mean(), all.variance(), all.count};
}

double joint_residue_limit(const StepDistribution& dist, const JointFunction& f) {
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0.0;
  for (const auto& a : dist.atoms()) {
    const double y = a.step;
    const double integral = Quadrature::integrate([&](double u) { return f(y, u); }, -y, 0.0, 15, 1e-13);
    total += a.weight * integral;
  }
  return total / dist.mean();
}

JointResidueCheck joint_residue_check(const StepDistribution& dist, const JointFunction& f,
                                      double t, std::size_t n, const McConfig& config) {
  require(t > dist.max_step() + 1.0, "joint residue check needs t > max step + 1");
  require(n > 0, "joint residue check needs at least one trajectory");
  auto chunks = run_chunks(n, config, [&](std::size_t, std::size_t begin, std::size_t end,
                                          RandomStream& stream) {
    MomentAccumulator acc;
    for (std::size_t i = begin; i < end; ++i) {
      const ResidueSample r = sample_stopping(dist, t, stream);
      acc.add(f(r.crossing_step, -r.undershoot));
    }
    return acc;
  });
  MomentAccumulator all;
  for (const auto& c : chunks) all.merge(c);
  return {all.mean(), all.standard_error(), joint_residue_limit(dist, f)};
}

std::complex<double> laplace(const StepDistribution& dist, std::complex<double> z) {
  cplx s = 0.0;
  for (const auto& a : dist.atoms()) s += a.weight * std::exp(-z * a.step);
  return s;
}

std::complex<double> u_function(const StepDistribution& dist, double b) {
  const double sigma = dist.mean();
  if (std::abs(b) < kUSeriesCutoff) {
    // 1 - L(z) = sigma z - m2 z^2 / 2 + m3 z^3 / 6 - ..., so
    // u(z) = a / sigma + (a^2 - c) z / sigma + O(z^2), a = m2/(2 sigma), c = m3/(6 sigma).
    const double a = dist.second_moment() / (2.0 * sigma);
    const double c = dist.third_moment() / (6.0 * sigma);
    const cplx z(0.0, b);
    return (a + (a * a - c) * z) / sigma;
  }
  const cplx gap = one_minus_laplace_i(dist, b);
  if (std::abs(gap) < kResonanceThreshold) {
    std::ostringstream os;
    os.precision(17);
    os << "1 - L(ib) vanishes at b=" << b << " (|gap|=" << std::abs(gap) << "): lattice resonance";
    throw Error(ErrorCode::kLatticeResonance, os.str());
  }
  return 1.0 / gap - 1.0 / (sigma * cplx(0.0, b));
}

DiophantineScan weakly_dioph_scan(const StepDistribution& dist, double l, double b_max,
                                  double grid_step, const ScanObserver& observer) {
  require(l > 0.0, "diophantine exponent l must be positive");
  require(b_max > 1.0, "scan range needs b_max > 1");
  require(grid_step > 0.0, "grid step must be positive");

  auto weighted = [&](double b) { return std::pow(b, l) * std::abs(one_minus_laplace_i(dist, b)); };

  const auto points = static_cast<std::size_t>(std::floor((b_max - 1.0) / grid_step)) + 1;
  // Grid local minima, best first; only these get refined.
  struct Candidate {
    double value;
    double b;
  };
  constexpr std::size_t kRefined = 16;
  std::vector<Candidate> candidates;
  double before = 0.0;
  double current = 0.0;
  double current_b = 1.0;
  DiophantineScan result{std::numeric_limits<double>::infinity(), 1.0, points};

  for (std::size_t i = 0; i < points; ++i) {
    const double b = 1.0 + grid_step * static_cast<double>(i);
    const double gap = std::abs(one_minus_laplace_i(dist, b));
    const double w = std::pow(b, l) * gap;
    if (observer) observer(b, gap, w);
    if (w < result.minimum) result = {w, b, points};
    if (i >= 2 && current <= before && current <= w) candidates.push_back({current, current_b});
    before = current;
    current = w;
    current_b = b;
    if (candidates.size() > 4 * kRefined) {
      std::sort(candidates.begin(), candidates.end(),
                [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
      candidates.resize(kRefined);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  if (candidates.size() > kRefined) candidates.resize(kRefined);

  // Gauss-Newton on g(b) = 1 - L(ib) inside each bracket; converges
  // quadratically onto exact zeros (lattice resonances).
  for (const auto& c : candidates) {
    const double lo = std::max(1.0, c.b - grid_step);
    const double hi = std::min(b_max, c.b + grid_step);
    double b = c.b;
    for (int iter = 0; iter < 60; ++iter) {
      const cplx g = one_minus_laplace_i(dist, b);
      const cplx dg = one_minus_laplace_i_derivative(dist, b);
      const double curvature = std::norm(dg);
      if (curvature == 0.0) break;
      const double next = std::clamp(b - (std::conj(dg) * g).real() / curvature, lo, hi);
      if (next == b) break;
      b = next;
    }
    const double w = weighted(b);
    if (w < result.minimum) {
      result.minimum = w;
      result.argmin = b;
    }
  }
  return result;
}

}  // namespace ssm
