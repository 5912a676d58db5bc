#pragma once

#include <cstdint>

namespace ncvar {

/// Deterministic 64-bit generator (SplitMix64). Used everywhere randomness
/// is needed so that results are reproducible across platforms; the standard
/// library distributions are implementation-defined and are avoided.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Unbiased uniform integer in [0, n) via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~0ull - ~0ull % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    /// Derived independent stream. Episode k of a rollout uses
    /// Rng(seed).split(k): one draw of the parent mixed with the stream index.
    Rng split(std::uint64_t stream) const {
        Rng parent(state_);
        std::uint64_t base = parent.next_u64();
        return Rng(base ^ (0xd1b54a32d192ed03ull * (stream + 1)));
    }

private:
    std::uint64_t state_;
};

} // namespace ncvar
