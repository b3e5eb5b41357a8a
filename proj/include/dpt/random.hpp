#pragma once

// Counter-based seeding: every independent stream (one per shot, per bootstrap
// resample, per pipeline stage) gets its own engine seeded from a hash of the
// parent seed and the stream index, so results never depend on scheduling.

#include <cstdint>
#include <random>
#include <string_view>

namespace dpt::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t labeled_seed(std::uint64_t seed, std::string_view label) {
  return stream_seed(seed, fnv1a(label));
}

inline std::mt19937_64 engine(std::uint64_t seed, std::uint64_t index) { return std::mt19937_64(stream_seed(seed, index)); }

/// Uniform double in [0, 1) from the top 53 bits (portable, unlike the std distributions).
inline double uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace dpt::rng
