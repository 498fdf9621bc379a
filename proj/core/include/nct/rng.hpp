#pragma once

#include <cstdint>
#include <cmath>

namespace nct {

/// Identifies one replicate of a seeded experiment. Distinct
/// (master_seed, replicate_index) pairs give statistically independent
/// streams; equal pairs reproduce bit-identical output regardless of
/// thread count or scheduling.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t replicate_index = 0;

    SeedSpec with_replicate(std::uint64_t i) const { return {master_seed, i}; }
};

/// Functional roles of the independent sub-streams inside one replicate.
/// Marks live on their own stream so that a pattern and its retention
/// marks can be regenerated independently of how the points were drawn.
namespace stream_role {
inline constexpr std::uint64_t points = 0x706f696e74735f30ULL;
inline constexpr std::uint64_t marks = 0x6d61726b735f5f30ULL;
inline constexpr std::uint64_t acceptance = 0x6163636570745f30ULL;
inline constexpr std::uint64_t generic = 0x67656e657269635fULL;
} // namespace stream_role

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ with counter-based stream derivation. The state is seeded
/// by hashing (master_seed, replicate_index, role) through splitmix64, so
/// streams can be constructed on any worker in any order.
class Rng {
public:
    Rng(SeedSpec seed, std::uint64_t role) {
        std::uint64_t mix = seed.master_seed;
        mix = splitmix64(mix) ^ (seed.replicate_index * 0xd1342543de82ef95ULL);
        mix = splitmix64(mix) ^ (role * 0xaf251af3b0f025b5ULL);
        for (auto& word : state_) word = splitmix64(mix);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exact Poisson draw by sequential inversion. Means above 500 are
    /// split into independent chunks so the running pmf never underflows.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::uint64_t total = 0;
        while (mean > 500.0) {
            total += poisson_inversion(500.0);
            mean -= 500.0;
        }
        return total + poisson_inversion(mean);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t poisson_inversion(double mean) {
        const double u = uniform01();
        double pmf = std::exp(-mean);
        double cdf = pmf;
        std::uint64_t n = 0;
        // Tail beyond mean + 40*sqrt(mean) + 60 has mass far below 2^-53.
        const std::uint64_t cap =
            static_cast<std::uint64_t>(mean + 40.0 * std::sqrt(mean) + 60.0);
        while (u > cdf && n < cap) {
            ++n;
            pmf *= mean / static_cast<double>(n);
            cdf += pmf;
        }
        return n;
    }

    std::uint64_t state_[4]{};
};

} // namespace nct
