#include "dhard/rng.hpp"

#include <limits>

namespace dhard {

std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t j, std::uint64_t w) {
  std::uint64_t key = mix64(seed) ^ mix64(stream);
  return mix64(key + j * 0x9e3779b97f4a7c15ULL + w);
}

std::uint64_t stream_id(std::span<const int> vars) {
  std::uint64_t h = 14695981039346656037ULL;
  for (int v : vars) {
    auto u = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::uint64_t uniform_below(Engine &rng, std::uint64_t bound) {
  // Largest multiple of bound that fits, so every residue is equally likely.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % bound;
}

double uniform_unit(Engine &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace dhard
