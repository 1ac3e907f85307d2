#pragma once

// Arithmetic of the contraction ratios: continued fractions, lattice detection
// for the log-ratio subgroup, diophantine exponent estimates and Pisot checks.
// Every verdict holds at double precision only.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ssm/ifs.hpp"

namespace ssm {

inline constexpr int kMaxContinuedFractionTerms = 40;
inline constexpr double kRationalRemainder = 1e-12;
// Relative distance at which a convergent reproduces a log-ratio.
inline constexpr double kRationalMatchTolerance = 1e-14;
inline constexpr std::int64_t kRationalDenominatorCap = 1'000'000;

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;

  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

struct ContinuedFraction {
  double value = 0.0;
  std::int64_t integer_part = 0;        // a_0
  std::vector<std::int64_t> quotients;  // a_1, a_2, ...
  std::vector<Convergent> convergents;  // p_k / q_k for k = 0, 1, ...
  bool terminated = false;              // rational at working precision
};

ContinuedFraction continued_fraction(double x, int max_terms);

enum class GroupVerdict { kLattice, kNonLattice, kUndetermined };

const char* to_string(GroupVerdict verdict);

struct GroupClassification {
  GroupVerdict verdict = GroupVerdict::kUndetermined;
  std::optional<double> generator;                            // lattice witness
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // non-lattice map pair
  int depth = 0;
};

GroupClassification classify_group(const IfsSpec& spec, int depth);

struct DiophantineEstimate {
  double l_estimate = 0.0;  // max local exponent: a lower bound on the type
  std::vector<double> exponents;
  std::vector<Convergent> convergents;  // the convergents the exponents belong to
};

DiophantineEstimate diophantine_exponent_estimate(double x, int depth);

struct PisotResult {
  bool is_pisot = false;
  std::vector<std::complex<double>> roots;
};

// Coefficients from the leading term down: x^2 - x - 1 is {1, -1, -1}.
PisotResult pisot_check(std::span<const std::int64_t> coefficients, double tolerance);

}  // namespace ssm
