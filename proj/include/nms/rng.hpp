#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace nms {

// Mixes a base seed with a stream label so that every consumer of randomness
// (each trader, the scheduler, the opinion model, dividends) owns an
// independent, reproducible stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// mt19937_64 is fully specified by the standard, but the std distributions
// are not, so all variate generation is done here.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();

  // Uniform on [lo, hi]; returns lo when hi <= lo.
  double uniform(double lo, double hi);

  // Uniform integer on [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform index in [0, n).
  std::size_t index(std::size_t n);

  bool bernoulli(double p);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace nms
