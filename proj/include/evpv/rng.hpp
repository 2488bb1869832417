#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evpv {

// Deterministic random helpers.  std::mt19937_64 produces an identical
// stream everywhere, but the std distributions are implementation-defined,
// so all sampling is done by hand here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform integer in [0, n); n must be > 0
    std::size_t bounded(std::size_t n) {
        // multiply-shift; bias is negligible for the small n used here and,
        // more importantly, the result is the same on every platform
        const unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        return static_cast<std::size_t>(m >> 64);
    }

    // uniform double in [0, 1) with 53 random bits
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool coin(double p) { return unit() < p; }

private:
    std::mt19937_64 eng_;
};

// FNV-1a; used to derive per-instance sub-seeds from string ids.
inline std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// splitmix64-style mixing for combining seeds
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace evpv
