#pragma once

#include <cstdint>

namespace denest {

// Counter-based random streams built on the SplitMix64 generator.
//
// Every (seed, agent, step) triple is hashed into an independent stream
// state, so a draw depends only on those three integers and never on
// execution order. That is what makes the agent update reproducible
// bit-for-bit under any OpenMP thread count.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Finalizer-only mix, used to spread structured keys before streaming.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct StreamRng {
  std::uint64_t state;

  StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
      : state(mix64(seed ^ mix64(0x632BE59BD9B4E019ULL * (stream + 1) +
                                 0x9E3779B97F4A7C15ULL * (counter + 1)))) {}

  std::uint64_t next_u64() { return splitmix64_next(state); }

  // Uniform on (0, 1]; never returns 0 so it is safe under log().
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Box-Muller pair of independent standard normals.
  void next_normal_pair(double& z0, double& z1);
};

}  // namespace denest
