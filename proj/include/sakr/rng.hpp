#pragma once

#include <cstdint>
#include <random>
#include <string_view>

// Deterministic randomness and hashing. std::mt19937_64 emits a bit-exact
// sequence on every conforming implementation; the std distributions do not,
// so uniform draws are derived from raw engine output here.

namespace sakr {

// FNV-1a over the bytes, seed folded into the offset basis, splitmix64
// finalizer to decorrelate the low bits used for bucketing.
inline std::uint64_t hash64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ull ^ seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebull;
    h ^= h >> 31;
    return h;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in [0, n). Modulo bias is ~n/2^64, irrelevant at this scale.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

}  // namespace sakr
