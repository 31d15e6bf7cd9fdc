// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oed {

// Deterministic random streams, generator version 1.
//
// Layout: a 64-bit stream key is derived from (seed, label, counter) by
// FNV-1a hashing followed by splitmix64 mixing, and seeds a std::mt19937_64
// (whose output sequence is fixed by the standard). Derived quantities avoid
// std::*_distribution, whose sequences are implementation-defined:
//   - uniform01: (x >> 11) * 2^-53 in [0, 1)
//   - normal: polar rejection method on uniform01 pairs (sqrt/log only)
//   - uniform_int: unbiased rejection sampling on the 64-bit output
// Identical (seed, label, counter) therefore reproduce identical draws for
// any standard library; bit-identical normals additionally assume a
// correctly rounded libm log.
class Rng {
 public:
  explicit Rng(std::uint64_t key);

  // Independent substream for a named purpose, e.g. ("matrix", attempt).
  static Rng substream(std::uint64_t seed, std::string_view label,
                       std::uint64_t counter = 0);

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double normal();
  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  long long uniform_int(long long lo, long long hi);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

// splitmix64 mixing step.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace oed
