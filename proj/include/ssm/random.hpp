#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <type_traits>
#include <algorithm>
#include <vector>

namespace ssm {

std::uint64_t splitmix64(std::uint64_t x);

// One independent stream of uniforms. Streams are derived from a master seed
// and a counter, so stream k is the same no matter which worker draws it.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : engine_(splitmix64(master_seed ^ splitmix64(stream_index + 0x632be59bd9b4e019ULL))) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Index j with probability cumulative[j] - cumulative[j-1]; cumulative.back() == 1.
  std::size_t pick(std::span<const double> cumulative) {
    const double u = uniform();
    std::size_t j = 0;
    while (j + 1 < cumulative.size() && u >= cumulative[j]) ++j;
    return j;
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<double> cumulative_weights(std::span<const double> weights);

struct McConfig {
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

// Number of samples per chunk in chunked Monte Carlo runs.
inline constexpr std::size_t kChunkSize = 1 << 14;

// Running first and second moments of a real statistic.
struct MomentAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  void merge(const MomentAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double variance() const;  // sample variance
  double standard_error() const;
};

void parallel_for_chunks(std::size_t chunks, unsigned workers,
                         const std::function<void(std::size_t chunk)>& task);

// Splits [0, n) into chunks of kChunkSize, runs body(chunk, begin, end, stream)
// on up to config.workers threads, and returns the per-chunk results in chunk
// order. Output depends on (seed, n) only.
template <typename Body>
auto run_chunks(std::size_t n, const McConfig& config, Body&& body) {
  using Result = std::invoke_result_t<Body&, std::size_t, std::size_t, std::size_t, RandomStream&>;
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<Result> results(chunks);
  parallel_for_chunks(chunks, config.workers, [&](std::size_t c) {
    RandomStream stream(config.seed, c);
    const std::size_t begin = c * kChunkSize;
    const std::size_t end = std::min(n, begin + kChunkSize);
    results[c] = body(c, begin, end, stream);
  });
  return results;
}

}  // namespace ssm
