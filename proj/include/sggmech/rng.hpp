#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sggmech {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Independent substream seed for item `index` under `master`.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept;

// mt19937_64 with hand-rolled distributions; identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller (one draw per call).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sggmech
