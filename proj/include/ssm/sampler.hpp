#pragma once

#include <cstddef>
#include <vector>

#include "ssm/ifs.hpp"
#include "ssm/random.hpp"

namespace ssm {

// Draws points f_{w_1} o ... o f_{w_depth}(hull midpoint) with i.i.d. letters
// distributed by the weights. The law is within r_max^depth of mu.
class MeasureSampler {
 public:
  MeasureSampler(const IfsSpec& spec, std::size_t depth);

  // Smallest depth with r_max^depth <= bias.
  static std::size_t depth_for(const IfsSpec& spec, double bias);

  double draw(RandomStream& stream) const {
    double x = start_;
    for (std::size_t i = 0; i < depth_; ++i) {
      const auto& f = maps_[stream.pick(cumulative_)];
      x = f.ratio * x + f.translation;
    }
    return x;
  }

  std::size_t depth() const { return depth_; }

 private:
  std::vector<SimilitudeMap> maps_;
  std::vector<double> cumulative_;
  std::size_t depth_;
  double start_;
};

}  // namespace ssm
