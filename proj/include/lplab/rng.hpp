#pragma once

#include <cstdint>
#include <utility>

namespace lplab::rng {

// Counter-based generator: every draw is a pure hash of (seed, index,
// channel), so sample streams are reproducible and independent of thread
// count or evaluation order.
struct CounterRng {
  std::uint64_t seed = 0;

  static std::uint64_t mix(std::uint64_t v) {
    v += 0x9E3779B97F4A7C15ull;
    v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
    v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
    return v ^ (v >> 31);
  }

  // uniform on (0, 1), never exactly 0 or 1
  double uniform(std::uint64_t index, std::uint64_t channel) const {
    const std::uint64_t h = mix(mix(seed ^ 0x5851F42D4C957F2Dull) + (index << 2) + channel);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal by Box-Muller on channels (c, c+1)
  double normal(std::uint64_t index, std::uint64_t channel) const {
    const double u1 = uniform(index, channel);
    const double u2 = uniform(index, channel + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }
};

}  // namespace lplab::rng
