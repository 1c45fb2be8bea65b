#pragma once

#include <cstdint>
#include <random>

namespace idfunc {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic random stream. Each stream is seeded independently, so
/// callers never share mutable generator state; derived streams give
/// per-replication reproducibility from one master seed.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        engine_.seed(detail::splitmix64(s));
    }

    static RandomStream derive(std::uint64_t master, std::uint64_t stream_id) {
        std::uint64_t s = master;
        (void)detail::splitmix64(s);  // decorrelate master
        s ^= (stream_id + 1) * 0x9e3779b97f4a7c15ULL;
        return RandomStream(detail::splitmix64(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw strictly inside (0,1): 53 random bits centered on
    /// half-steps, so 0 and 1 are unreachable.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace idfunc
