#pragma once

#include "ddlink/common.hpp"

#include <cstdint>

namespace ddlink {

/// splitmix64 step; used both as a standalone generator and to mix
/// (seed, index, ...) tuples into independent stream seeds.
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and up to three stream labels.
/// Same inputs give the same child on every platform.
inline uint64_t derive_seed(uint64_t parent, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = parent;
    uint64_t h = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(s);
    s ^= c + 0x8bb84b93962eacc9ULL;
    h ^= splitmix64(s);
    return h;
}

/**
 * Deterministic random stream (xoshiro-free: plain splitmix64 core).
 *
 * All randomness in the library flows through this class so that results
 * are reproducible bit-for-bit across runs, thread counts and platforms;
 * std::random distributions are avoided on purpose (their output is
 * implementation-defined).
 */
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, 2*pi).
    double angle() { return kTwoPi * uniform(); }

    uint32_t bit() { return static_cast<uint32_t>(next_u64() >> 63); }

    /// Standard normal via Box-Muller (one value per call, cached pair).
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    /// Circular complex Gaussian, unit variance (0.5 per real dimension).
    cd cgauss() {
        const double s = std::sqrt(0.5);
        return {s * gauss(), s * gauss()};
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ddlink
