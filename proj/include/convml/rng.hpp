#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace convml {

// Deterministic randomness helpers. Everything randomized in this library is
// driven by one top-level seed; component sub-seeds are derived with
// derive_seed(master, tag), and all bounded draws go through Engine so the
// same seed produces the same stream on every platform. std::mt19937_64's
// output sequence is pinned by the standard; the distribution adaptors below
// are hand-rolled because the standard library's are not.

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view text) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Sub-seed for a named component: mixes the master seed with the tag hash.
inline uint64_t derive_seed(uint64_t master, std::string_view tag) {
    uint64_t state = master ^ fnv1a64(tag);
    return splitmix64(state);
}

class Engine {
public:
    explicit Engine(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    /// Unbiased draw in [0, n). n must be > 0.
    uint64_t below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    /// Inclusive integer range.
    uint64_t range(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double range_real(double lo, double hi) { return lo + (hi - lo) * unit(); }

    bool chance(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        // Fisher-Yates with our own bounded draw, for cross-platform stability.
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& pool) {
        return pool[static_cast<size_t>(below(pool.size()))];
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace convml
