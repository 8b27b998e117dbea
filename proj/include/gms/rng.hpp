#pragma once

#include <cstdint>
#include <vector>

namespace gms::rng {

/// Disjoint namespaces for every consumer of randomness. Deriving streams
/// from (seed, space, index) instead of sharing one generator keeps results
/// independent of evaluation order and worker count, and guarantees the
/// train/test split never shares a stream with data generation.
enum class Space : std::uint64_t {
    Synthetic = 1,         // bundled synthetic record generator
    WeightSample = 2,      // basis weight sampling
    Generation = 3,        // dataset generation (material parameters)
    Split = 4,             // train/test split shuffle
    ValidateGenerated = 5, // validation protocol on generated motions
    ValidateRecord = 6,    // validation protocol around a recorded motion
    ForestTree = 7,        // per-tree bootstrap resampling
    SvrSubsample = 8,      // SVR training subsample selection
    DnnInit = 9,           // layer weight initialisation
    DnnShuffle = 10,       // per-epoch minibatch shuffling
    CvFold = 11,           // cross-validation fold assignment
};

namespace detail {

/// SplitMix64 output function (Steele, Lea, Flood 2014). Passes BigCrush
/// for the stream lengths used here and is trivially portable.
inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-based deterministic random stream. A stream is identified by
/// (seed, space, index); the same triple always yields the same sequence
/// on every platform.
class Stream {
public:
    Stream(std::uint64_t seed, Space space, std::uint64_t index = 0) {
        std::uint64_t s = 0x9e3779b97f4a7c15ULL;
        s = detail::mix(s ^ seed);
        s = detail::mix(s ^ static_cast<std::uint64_t>(space));
        s = detail::mix(s ^ index);
        identity_ = s;
        state_ = s;
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

    /// Unbiased integer in [0, n). Rejection keeps the draw exactly uniform.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t rem = (0 - n) % n; // 2^64 mod n
        const std::uint64_t limit = 0 - rem;   // largest multiple of n
        std::uint64_t r = next_u64();
        while (rem != 0 && r >= limit) {
            r = next_u64();
        }
        return r % n;
    }

    /// Fisher-Yates shuffle driven by this stream.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Child stream derived from this stream's identity, not its current
    /// position, so children are reproducible regardless of how much of the
    /// parent has been consumed.
    Stream child(std::uint64_t index) const {
        Stream c(*this);
        c.identity_ = detail::mix(identity_ ^ detail::mix(index + 0x517cc1b727220a95ULL));
        c.state_ = c.identity_;
        return c;
    }

private:
    std::uint64_t identity_;
    std::uint64_t state_;
};

} // namespace gms::rng
