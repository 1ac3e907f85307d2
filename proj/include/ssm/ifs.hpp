#pragma once

// Iterated function systems of similitudes f_j(x) = r_j x + b_j on the line,
// their words, stopping word sets and the moments of the self-similar measure
// mu = sum_j p_j f_j mu.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ssm/error.hpp"

namespace ssm {

inline constexpr double kWeightSumTolerance = 1e-12;
inline constexpr double kSingletonTolerance = 1e-12;
inline constexpr std::size_t kDefaultWordCap = 50'000'000;

struct SimilitudeMap {
  double ratio = 0.0;
  double translation = 0.0;
  double weight = 0.0;

  double operator()(double x) const { return ratio * x + translation; }
  double fixed_point() const { return translation / (1.0 - ratio); }
};

struct Interval {
  double low = 0.0;
  double high = 0.0;

  double width() const { return high - low; }
  double midpoint() const { return 0.5 * (low + high); }
};

// A validated system. Construct through validate_ifs() or normalize_to_unit().
class IfsSpec {
 public:
  std::span<const SimilitudeMap> maps() const { return maps_; }
  const SimilitudeMap& map(std::size_t j) const { return maps_[j]; }
  std::size_t size() const { return maps_.size(); }
  bool normalized() const { return normalized_; }

  double min_ratio() const;
  double max_ratio() const;
  bool all_ratios_equal() const;

 private:
  friend IfsSpec validate_ifs(std::span<const SimilitudeMap> raw);
  friend IfsSpec normalize_to_unit(const IfsSpec& spec);

  IfsSpec(std::vector<SimilitudeMap> maps, bool normalized)
      : maps_(std::move(maps)), normalized_(normalized) {}

  std::vector<SimilitudeMap> maps_;
  bool normalized_ = false;
};

using Letter = std::uint32_t;

struct Word {
  std::vector<Letter> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  bool is_proper_prefix_of(const Word& other) const;
  friend bool operator==(const Word&, const Word&) = default;
};

// f_w = f_{w_1} o ... o f_{w_n}: x -> ratio * x + translation, with weight p_w.
struct CompositeMap {
  double ratio = 1.0;
  double translation = 0.0;
  double weight = 1.0;

  double operator()(double x) const { return ratio * x + translation; }
  // (this o other)
  CompositeMap then(const CompositeMap& inner) const;
  CompositeMap append(const SimilitudeMap& f) const;
};

struct StoppingEntry {
  Word word;
  CompositeMap map;
};

struct StoppingWordSet {
  double threshold = 0.0;
  std::vector<StoppingEntry> entries;

  double total_weight() const;  // compensated sum
};

// Checks every IfsSpec invariant. Throws Error on rejection; never normalizes.
IfsSpec validate_ifs(std::span<const SimilitudeMap> raw);

// Convex hull [A, B] of the attractor: A = min_j f_j(A), B = max_j f_j(B).
Interval attractor_hull(const IfsSpec& spec);

// Affine conjugate with attractor hull inside [0, 1]. Ratios and weights are
// unchanged. A spec whose hull already lies in [0, 1] is returned as is.
IfsSpec normalize_to_unit(const IfsSpec& spec);

CompositeMap compose(const IfsSpec& spec, const Word& word);

// Similarity exponent d with sum_j r_j^d = 1.
double similarity_exponent(const IfsSpec& spec);

struct WordCountEstimate {
  double lower = 0.0;  // e^{d t}
  double upper = 0.0;  // e^{d t} / r_min^d
};
WordCountEstimate estimate_stopping_word_count(const IfsSpec& spec, double t);

// Visits W_t depth-first, letters in spec order, without materializing words.
// The visitor receives the composite map and the word length.
using StoppingVisitor = std::function<void(const CompositeMap&, std::size_t depth)>;
std::size_t visit_stopping_words(const IfsSpec& spec, double t, const StoppingVisitor& visit,
                                 std::size_t cap = kDefaultWordCap);

StoppingWordSet enumerate_stopping_words(const IfsSpec& spec, double t,
                                         std::size_t cap = kDefaultWordCap);

// Moments m_0..m_K of mu. Requires a normalized spec.
std::vector<double> moments(const IfsSpec& spec, int max_order);

}  // namespace ssm
