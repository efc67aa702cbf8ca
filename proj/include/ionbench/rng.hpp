#pragma once

#include <cstdint>
#include <random>

namespace ionbench {

// splitmix64; used to derive independent stream seeds from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a child stream. Chained hashing keeps results independent of
/// execution order, so sweeps can parallelize over oracles/shots freely.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(a + 1)) ^ splitmix64(b + 0x51ed2701a9b3e02dULL));
}

/// Deterministic random stream. Wraps mt19937_64 but produces uniforms by
/// hand: std::uniform_real_distribution is implementation-defined, and the
/// seeding contract promises identical outputs for identical seeds.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) {
        if (p <= 0.0) {
            return false;
        }
        if (p >= 1.0) {
            return true;
        }
        return uniform() < p;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ionbench
