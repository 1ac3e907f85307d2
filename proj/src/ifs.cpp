#include "ssm/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssm {
namespace {

std::string describe(std::size_t j, const SimilitudeMap& f) {
  std::ostringstream os;
  os.precision(17);
  os << "map " << j << " (r=" << f.ratio << ", b=" << f.translation << ", p=" << f.weight << ")";
  return os.str();
}

// Neumaier summation; stopping sets hold up to ~1e7 tiny weights.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

template <typename Callback>
std::size_t depth_first_stopping(const IfsSpec& spec, double t, std::size_t cap,
                                 Callback&& on_word) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument, "stopping threshold t must be positive and finite");
  }
  const WordCountEstimate estimate = estimate_stopping_word_count(spec, t);
  if (estimate.lower > static_cast<double>(cap)) {
    std::ostringstream os;
    os << "stopping set at t=" << t << " has at least " << estimate.lower
       << " words (cap " << cap << ")";
    throw ExplosionError(os.str(), estimate.lower);
  }

  const double level = std::exp(-t);
  const auto alphabet = static_cast<Letter>(spec.size());

  struct Frame {
    CompositeMap map;
    Letter next = 0;
  };
  std::vector<Frame> stack{Frame{}};
  std::vector<Letter> path;
  std::size_t count = 0;

  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == alphabet) {
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    const Letter j = top.next++;
    const CompositeMap child = top.map.append(spec.map(j));
    path.push_back(j);
    if (child.ratio <= level) {
      if (++count > cap) {
        std::ostringstream os;
        os << "stopping set at t=" << t << " exceeds the word cap " << cap
           << " (estimated " << estimate.lower << " to " << estimate.upper << " words)";
        throw ExplosionError(os.str(), estimate.upper);
      }
      on_word(child, std::span<const Letter>(path));
      path.pop_back();
    } else {
      stack.push_back(Frame{child, 0});
    }
  }
  return count;
}

}  // namespace

double IfsSpec::min_ratio() const {
  return std::min_element(maps_.begin(), maps_.end(),
                          [](const auto& a, const auto& b) { return a.ratio < b.ratio; })
      ->ratio;
}

double IfsSpec::max_ratio() const {
  return std::max_element(maps_.begin(), maps_.end(),
                          [](const auto& a, const auto& b) { return a.ratio < b.ratio; })
      ->ratio;
}

bool IfsSpec::all_ratios_equal() const {
  return std::all_of(maps_.begin(), maps_.end(),
                     [&](const SimilitudeMap& f) { return f.ratio == maps_.front().ratio; });
}

bool Word::is_proper_prefix_of(const Word& other) const {
  return letters.size() < other.letters.size() &&
         std::equal(letters.begin(), letters.end(), other.letters.begin());
}

CompositeMap CompositeMap::then(const CompositeMap& inner) const {
  return CompositeMap{ratio * inner.ratio, ratio * inner.translation + translation,
                      weight * inner.weight};
}

CompositeMap CompositeMap::append(const SimilitudeMap& f) const {
  return CompositeMap{ratio * f.ratio, ratio * f.translation + translation, weight * f.weight};
}

double StoppingWordSet::total_weight() const {
  CompensatedSum sum;
  for (const auto& e : entries) sum.add(e.map.weight);
  return sum.value();
}

IfsSpec validate_ifs(std::span<const SimilitudeMap> raw) {
  if (raw.size() < 2) {
    throw Error(ErrorCode::kTooFewMaps,
                "an IFS needs at least 2 maps, got " + std::to_string(raw.size()));
  }
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const auto& f = raw[j];
    if (!std::isfinite(f.ratio) || !(f.ratio > 0.0 && f.ratio < 1.0)) {
      throw Error(ErrorCode::kRatioRange, describe(j, f) + ": ratio must lie in (0,1)");
    }
    if (!std::isfinite(f.translation)) {
      throw Error(ErrorCode::kInvalidArgument, describe(j, f) + ": translation is not finite");
    }
    if (!std::isfinite(f.weight) || !(f.weight > 0.0 && f.weight < 1.0)) {
      throw Error(ErrorCode::kWeightRange, describe(j, f) + ": weight must lie in (0,1)");
    }
  }
  CompensatedSum total;
  for (const auto& f : raw) total.add(f.weight);
  if (std::abs(total.value() - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total.value() << ", expected 1";
    throw Error(ErrorCode::kWeightSum, os.str());
  }
  const double first = raw.front().fixed_point();
  const bool singleton = std::all_of(raw.begin(), raw.end(), [&](const SimilitudeMap& f) {
    return std::abs(f.fixed_point() - first) <= kSingletonTolerance;
  });
  if (singleton) {
    std::ostringstream os;
    os.precision(17);
    os << "all fixed points equal " << first << ": the attractor is a singleton";
    throw Error(ErrorCode::kSingleton, os.str());
  }
  return IfsSpec(std::vector<SimilitudeMap>(raw.begin(), raw.end()), false);
}

Interval attractor_hull(const IfsSpec& spec) {
  // The lower endpoint is the fixed point of A -> min_j f_j(A); the smallest
  // map fixed point already satisfies it, the loop only polishes rounding.
  Interval hull{spec.map(0).fixed_point(), spec.map(0).fixed_point()};
  for (const auto& f : spec.maps()) {
    hull.low = std::min(hull.low, f.fixed_point());
    hull.high = std::max(hull.high, f.fixed_point());
  }
  for (int iter = 0; iter < 50; ++iter) {
    Interval next{spec.map(0)(hull.low), spec.map(0)(hull.high)};
    for (const auto& f : spec.maps()) {
      next.low = std::min(next.low, f(hull.low));
      next.high = std::max(next.high, f(hull.high));
    }
    const bool converged = std::abs(next.low - hull.low) <= 1e-14 &&
                           std::abs(next.high - hull.high) <= 1e-14;
    hull = next;
    if (converged) break;
  }
  return hull;
}

IfsSpec normalize_to_unit(const IfsSpec& spec) {
  const Interval hull = attractor_hull(spec);
  constexpr double slack = 1e-12;
  if (hull.low >= -slack && hull.high <= 1.0 + slack) {
    return IfsSpec(std::vector<SimilitudeMap>(spec.maps().begin(), spec.maps().end()), true);
  }
  const double scale = hull.width();
  std::vector<SimilitudeMap> maps;
  maps.reserve(spec.size());
  for (const auto& f : spec.maps()) {
    // phi(x) = (x - A) / (B - A); phi o f o phi^{-1}(y) = r y + (f(A) - A) / (B - A).
    maps.push_back({f.ratio, (f(hull.low) - hull.low) / scale, f.weight});
  }
  return IfsSpec(std::move(maps), true);
}

CompositeMap compose(const IfsSpec& spec, const Word& word) {
  if (word.empty()) throw Error(ErrorCode::kEmptyWord, "cannot compose the empty word");
  CompositeMap acc;
  for (const Letter j : word.letters) {
    if (j >= spec.size()) {
      throw Error(ErrorCode::kInvalidLetter,
                  "letter " + std::to_string(j) + " out of range for " +
                      std::to_string(spec.size()) + " maps");
    }
    acc = acc.append(spec.map(j));
  }
  return acc;
}

double similarity_exponent(const IfsSpec& spec) {
  auto pressure = [&](double d) {
    double s = 0.0;
    for (const auto& f : spec.maps()) s += std::pow(f.ratio, d);
    return s;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (pressure(hi) > 1.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pressure(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

WordCountEstimate estimate_stopping_word_count(const IfsSpec& spec, double t) {
  // sum_{w in W_t} r_w^d = 1 with r_min e^{-t} < r_w <= e^{-t}.
  const double d = similarity_exponent(spec);
  const double lower = std::exp(d * t);
  return {lower, lower * std::pow(spec.min_ratio(), -d)};
}

std::size_t visit_stopping_words(const IfsSpec& spec, double t, const StoppingVisitor& visit,
                                 std::size_t cap) {
  return depth_first_stopping(spec, t, cap,
                              [&](const CompositeMap& map, std::span<const Letter> path) {
                                visit(map, path.size());
                              });
}

StoppingWordSet enumerate_stopping_words(const IfsSpec& spec, double t, std::size_t cap) {
  StoppingWordSet set;
  set.threshold = t;
  depth_first_stopping(spec, t, cap, [&](const CompositeMap& map, std::span<const Letter> path) {
    set.entries.push_back({Word{{path.begin(), path.end()}}, map});
  });
  return set;
}

std::vector<double> moments(const IfsSpec& spec, int max_order) {
  if (!spec.normalized()) {
    throw Error(ErrorCode::kNotNormalized, "moments require a spec normalized to [0,1]");
  }
  if (max_order < 0) throw Error(ErrorCode::kInvalidArgument, "moment order must be >= 0");
  const auto K = static_cast<std::size_t>(max_order);
  std::vector<double> m(K + 1, 0.0);
  m[0] = 1.0;
  // Pascal row of binomial coefficients, rebuilt per order.
  std::vector<double> binom{1.0};
  for (std::size_t k = 1; k <= K; ++k) {
    std::vector<double> next(k + 1, 1.0);
    for (std::size_t i = 1; i < k; ++i) next[i] = binom[i - 1] + binom[i];
    binom = std::move(next);

    double rhs = 0.0;
    double denom = 1.0;
    for (const auto& f : spec.maps()) {
      double term = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        term += binom[i] * std::pow(f.ratio, static_cast<double>(i)) *
                std::pow(f.translation, static_cast<double>(k - i)) * m[i];
      }
      rhs += f.weight * term;
      denom -= f.weight * std::pow(f.ratio, static_cast<double>(k));
    }
    m[k] = rhs / denom;
  }
  return m;
}

}  // namespace ssm
