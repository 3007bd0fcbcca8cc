#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace dhard {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-mode bit stream: word `w` of sample `j` is
///   mix64(mix64(seed) ^ mix64(stream) + j * 0x9e3779b97f4a7c15 + w).
/// Sample j therefore depends only on (seed, stream, j), which keeps the
/// prefix of a sample stable when it is later extended.
std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t j, std::uint64_t w);

/// Stream id for a variable set (FNV-1a over the sorted indices).
std::uint64_t stream_id(std::span<const int> vars);

/// Platform-stable helpers over std::mt19937_64 (whose output sequence is
/// fixed by the standard, unlike the <random> distributions).
using Engine = std::mt19937_64;

/// Uniform integer in [0, bound); bound > 0. Rejection sampling.
std::uint64_t uniform_below(Engine &rng, std::uint64_t bound);
/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Engine &rng);

} // namespace dhard
