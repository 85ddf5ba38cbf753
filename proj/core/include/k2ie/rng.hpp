#pragma once

#include <cstdint>
#include <random>

namespace k2ie {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds from a root
// seed and an index so that parallel schedules never change results.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix_seed(mix_seed(root) ^ mix_seed(index + 0x51ed2701ULL));
}

inline Rng make_rng(std::uint64_t root, std::uint64_t index) {
  return Rng(derive_seed(root, index));
}

}  // namespace k2ie
