#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sparseboot {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for the stream keyed by (master, k0, k1, ...). Order of keys matters.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = mix64(master);
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

// Uniform integer in [0, bound) by rejection; bound >= 1. Independent of the
// standard library's distribution implementation.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    // Reject the lowest 2^64 mod bound values so the rest split evenly.
    const std::uint64_t threshold = (std::uint64_t{0} - bound) % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw < threshold);
    return draw % bound;
}

}  // namespace sparseboot
