#ifndef UDEP_RNG_HPP
#define UDEP_RNG_HPP

#include <cstdint>
#include <random>

namespace udep {

// splitmix64 finalizer; used both for hashing and for deriving sub-seeds.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic sub-seed derivation: one master seed, distinct streams per
// (stage, index) pair.
inline uint64_t derive_seed(uint64_t master, uint64_t stage, uint64_t index = 0) {
  return mix64(mix64(master ^ (stage * 0x9e3779b97f4a7c15ULL)) ^ index);
}

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace udep

#endif  // UDEP_RNG_HPP
