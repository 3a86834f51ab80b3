#pragma once

#include <cstdint>

namespace dimlab {

// Counter-based RNG: each sample index gets its own stream derived from the
// master seed, so results do not depend on how samples are split across
// workers.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t counter)
      : state_(splitmix64(seed ^ (counter * 0xD1B54A32D192ED03ull) ^ 0x8BB84B93962EACC9ull)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  // uniform in [0,1) with 53 random bits
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [a,b)
  double uniform(double a, double b) { return a + (b - a) * next_double(); }

 private:
  std::uint64_t state_;
};

}  // namespace dimlab
