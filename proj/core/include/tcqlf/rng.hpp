#pragma once

#include <cstdint>
#include <random>

namespace tcqlf {

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of an independent substream: one golden-ratio increment per stream
// id pushed through the finalizer, then mixed once more with the master
// seed. Every (trial, user) pair in a simulation owns its own stream, so
// results do not depend on how work is scheduled across threads.
inline std::uint64_t stream_seed(std::uint64_t master_seed,
                                 std::uint64_t stream_id) {
  return splitmix64(master_seed ^ splitmix64(stream_id));
}

// 64-bit Mersenne Twister seeded for the given substream.
inline std::mt19937_64 make_stream(std::uint64_t master_seed,
                                   std::uint64_t stream_id) {
  return std::mt19937_64(stream_seed(master_seed, stream_id));
}

}  // namespace tcqlf
