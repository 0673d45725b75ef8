#pragma once

#include <cstdint>
#include <string_view>

namespace linktrail {

/// Deterministic 64-bit PRNG (SplitMix64). Used everywhere a seeded stream
/// is required; std::uniform_*_distribution is not bit-stable across
/// standard library implementations, so we do not rely on it.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0,1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] (inclusive). Modulo bias is irrelevant at
    /// the ranges used here (single-digit spans).
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next() % span);
    }

private:
    std::uint64_t state_;
};

/// FNV-1a over an explicit seed plus a string. Stable across platforms and
/// runs; the latency model depends on that.
inline std::uint64_t stable_hash(std::uint64_t seed, std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < 8; ++i) {
        h ^= (seed >> (8 * i)) & 0xffULL;
        h *= 0x100000001b3ULL;
    }
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace linktrail
