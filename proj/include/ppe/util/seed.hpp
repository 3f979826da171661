#pragma once

#include <cstdint>
#include <string_view>

namespace ppe {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a named component, derived from the run's base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view component) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : component) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(base ^ splitmix64(h));
}

/// Seed for one item (frame, request, ...) of a seeded stream.
constexpr std::uint64_t item_seed(std::uint64_t base, std::uint64_t item) noexcept {
    return splitmix64(base ^ splitmix64(item + 0x632be59bd9b4e019ULL));
}

}  // namespace ppe
