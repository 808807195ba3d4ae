// Seeded, platform-independent random numbers.
//
// std::uniform_int_distribution is implementation-defined, so corpus
// generation and site selection use this generator to stay byte-stable
// across standard libraries.

#pragma once

#include <cstdint>
#include <string_view>

namespace metamorph {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling removes modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform in [lo, hi].
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool chance(unsigned percent) { return below(100) < percent; }

    /// Child generator with an independent stream.
    SplitMix64 split() { return SplitMix64(next() ^ 0xD1B54A32D192ED03ULL); }

private:
    std::uint64_t state_;
};

/// FNV-1a, used to key streams by text.
inline std::uint64_t hash_text(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a ^ (b * 0x9E3779B97F4A7C15ULL));
    return g.next();
}

}  // namespace metamorph
