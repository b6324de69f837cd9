#pragma once

#include <cstdint>

namespace sptk {

/// Small deterministic generator (splitmix64). Used everywhere randomness is
/// needed so that reports are reproducible bit-for-bit across runs and
/// platforms, independent of the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Uniform double in [0, 1).
    double uniform() { return double(next_u64() >> 11) * (1.0 / 9007199254740992.0); }

    /// Uniform double in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

private:
    std::uint64_t state_;
};

} // namespace sptk
