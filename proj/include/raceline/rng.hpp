#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace raceline {

// splitmix64 finalizer; bijective, decent avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic derivation of independent seed streams from a master seed.
// `tag` separates purposes (track generation, action sampling, ...);
// `a`/`b` index within a purpose (epoch, episode, trial, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(mix64(master ^ h) + a) + b);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view tag,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
    return std::mt19937_64(derive_seed(master, tag, a, b));
}

}  // namespace raceline
