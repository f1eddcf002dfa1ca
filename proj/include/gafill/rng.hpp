#pragma once

#include <cstdint>
#include <random>

namespace gafill {

/// Seeded random stream used everywhere randomness is needed.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard)
/// and converts to doubles with an explicit shift-and-scale so results are
/// identical across standard library implementations. All derived seeds go
/// through mix() so independent streams never share state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

    bool coin() { return (next_u64() & 1u) != 0; }

    /// Derives a decorrelated child seed from (seed, stream index).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        return splitmix64(splitmix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1)));
    }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace gafill
