#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dfo {

using Rng = std::mt19937_64;

namespace detail {

// splitmix64 finalizer; decorrelates nearby seeds
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Derive an independent child seed from a run seed and a stream label.
// All randomness in a run flows from one seed, forked per component.
inline std::uint64_t fork_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return detail::mix64(seed ^ detail::mix64(h));
}

inline Rng make_rng(std::uint64_t seed, std::string_view label) {
  return Rng(fork_seed(seed, label));
}

}  // namespace dfo
