#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mtsent {

/// Deterministic random source. The engine is std::mt19937_64 (fully specified
/// by the standard) and every derived draw below is implemented by hand, so a
/// given seed produces the same stream on every platform and build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). Modulo bias is below n/2^64 and irrelevant here.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  /// splitmix64 finalizer; used to derive independent substream seeds.
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  /// Seed for the sub-stream `stream` of a master seed. Distinct streams keep
  /// consumers (init, task sampling, shuffling, dropout) independent.
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
    return splitmix(splitmix(seed) ^ splitmix(stream));
  }

 private:
  std::mt19937_64 engine_;
};

/// Fixed sub-stream tags used across the library.
namespace stream {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kTaskSampler = 2;
inline constexpr std::uint64_t kDropout = 3;
inline constexpr std::uint64_t kShuffleBase = 16;  // + task index
}  // namespace stream

}  // namespace mtsent
