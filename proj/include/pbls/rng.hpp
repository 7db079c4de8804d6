#pragma once

#include <cstdint>
#include <random>

namespace pbls {

// Deterministic random source. Draws go through mt19937_64 directly (the
// engine output sequence is pinned by the standard, unlike the distribution
// adaptors), so a seed reproduces the same run on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n); n must be positive.
    std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    // Uniform in [lo, hi], inclusive.
    std::int64_t next_in_range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    int next_bit() { return static_cast<int>(engine_() & 1u); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace pbls
