#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ssm/ifs.hpp"

namespace ssm::testing {

inline IfsSpec cantor() {
  const std::vector<SimilitudeMap> maps{{1.0 / 3, 0.0, 0.5}, {1.0 / 3, 2.0 / 3, 0.5}};
  return normalize_to_unit(validate_ifs(maps));
}

// Two halves of [0,1]; mu is Lebesgue measure.
inline IfsSpec uniform_halves() {
  const std::vector<SimilitudeMap> maps{{0.5, 0.0, 0.5}, {0.5, 0.5, 0.5}};
  return normalize_to_unit(validate_ifs(maps));
}

// Ratios {1/2, 1/3}, translations (0, 2/3): the non-lattice fixture.
inline IfsSpec half_third() {
  const std::vector<SimilitudeMap> maps{{0.5, 0.0, 0.5}, {1.0 / 3, 2.0 / 3, 0.5}};
  return normalize_to_unit(validate_ifs(maps));
}

// 2-4 maps with sum of ratios <= 0.95, so |W_t| stays below ~e^t / r_min.
inline IfsSpec random_spec(std::mt19937_64& rng, bool normalize = true) {
  std::uniform_int_distribution<int> count(2, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  std::vector<SimilitudeMap> maps(static_cast<std::size_t>(n));
  double ratio_budget = 0.95;
  double weight_total = 0.0;
  for (int j = 0; j < n; ++j) {
    auto& f = maps[static_cast<std::size_t>(j)];
    f.ratio = (0.1 + 0.9 * unit(rng)) * ratio_budget / (n - j);
    ratio_budget -= f.ratio;
    f.translation = 4.0 * unit(rng) - 2.0;
    f.weight = 0.2 + unit(rng);
    weight_total += f.weight;
  }
  for (auto& f : maps) f.weight /= weight_total;
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < maps.size(); ++j) sum += maps[j].weight;
  maps.back().weight = 1.0 - sum;
  const IfsSpec spec = validate_ifs(maps);
  return normalize ? normalize_to_unit(spec) : spec;
}

}  // namespace ssm::testing
