#pragma once

#include <cstdint>

namespace sdaccel {

// Counter-based 64-bit generator (splitmix-style mixing). All synthetic data
// in the project flows through this so a fixed seed reproduces identical
// tensors and streams on every platform, independent of libstdc++
// distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n). Multiply-high mapping; bias is < 2^-32 for the
    // ranges used here (n <= 4096).
    uint32_t next_below(uint32_t n) {
        return static_cast<uint32_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return next_double() < p; }

private:
    uint64_t state_;
};

} // namespace sdaccel
