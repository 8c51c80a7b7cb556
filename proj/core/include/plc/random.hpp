#pragma once

#include <cstdint>
#include <random>

namespace plc {

// Every random stream in the library is keyed by (seed, phase, index) so that
// results do not depend on iteration order or worker count.
enum class Stream : std::uint64_t {
  kInit = 1,
  kKmeans = 2,
  kJitter = 3,
  kRotation = 4,
  kSynthFactors = 5,
  kSynthWeights = 6,
  kSynthNoise = 7,
  kSynthShuffle = 8,
  kSplit = 9,
  kClassifier = 10,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream phase, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(phase)) ^ index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, Stream phase, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, phase, index));
}

}  // namespace plc
