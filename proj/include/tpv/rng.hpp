#pragma once

#include <cstdint>
#include <stdexcept>

#include "tpv/rational.hpp"

namespace tpv {

// SplitMix64 stream. Chosen over <random> engines+distributions because the
// standard distributions are implementation-defined; this generator produces
// the same sequence on every platform, which keeps seeded runs replayable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform value in {0, ..., n} by rejection from the 64-bit stream.
  Int uniform_upto(const Int& n) {
    if (n < 0) throw std::invalid_argument("uniform_upto: negative bound");
    if (n == 0) return Int(0);
    if (n >= Int(1) << 62)
      throw std::invalid_argument("uniform_upto: bound too wide for the sampler");
    std::uint64_t span = n.convert_to<std::uint64_t>() + 1;
    std::uint64_t threshold = (0ULL - span) % span;  // 2^64 mod span
    for (;;) {
      std::uint64_t v = next_u64();
      if (v >= threshold) return Int(v % span);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace tpv
