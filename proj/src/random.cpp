#include "ssm/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace ssm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> cumulative_weights(std::span<const double> weights) {
  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j];
    cumulative[j] = acc;
  }
  if (!cumulative.empty()) cumulative.back() = 1.0;
  return cumulative;
}

double MomentAccumulator::variance() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double m = sum / n;
  return std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
}

double MomentAccumulator::standard_error() const {
  return count ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

void parallel_for_chunks(std::size_t chunks, unsigned workers,
                         const std::function<void(std::size_t)>& task) {
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(chunks, 1));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) task(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          task(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ssm
