#include "ssm/sampler.hpp"

#include <cmath>

namespace ssm {

MeasureSampler::MeasureSampler(const IfsSpec& spec, std::size_t depth)
    : maps_(spec.maps().begin(), spec.maps().end()),
      depth_(depth),
      start_(attractor_hull(spec).midpoint()) {
  std::vector<double> weights;
  for (const auto& f : maps_) weights.push_back(f.weight);
  cumulative_ = cumulative_weights(weights);
}

std::size_t MeasureSampler::depth_for(const IfsSpec& spec, double bias) {
  if (!(bias > 0.0 && bias < 1.0)) throw Error(ErrorCode::kInvalidArgument, "bias must lie in (0,1)");
  return static_cast<std::size_t>(std::ceil(std::log(bias) / std::log(spec.max_ratio())));
}

}  // namespace ssm
