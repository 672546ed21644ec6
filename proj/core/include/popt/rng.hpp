#pragma once

#include <cstdint>
#include <random>

namespace popt {

using Rng = std::mt19937_64;

// splitmix64 step; decorrelates derived seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-stream seed derived from a master seed. Stream 0, 1, ...
// give independent generators; used to make parallel trials reproducible.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream * 0xd1342543de82ef95ULL + 1));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace popt
