#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace psaws {

// SplitMix64 finalizer, used to whiten seed material.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_label(std::string_view label) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent engine from (seed, label, index). Streams are
/// stable: adding a new label never perturbs existing ones.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view label,
                                   std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(hash_label(label)) ^
                                 splitmix64(0x6a09e667f3bcc909ULL + index));
    return std::mt19937_64(s);
}

}  // namespace psaws
