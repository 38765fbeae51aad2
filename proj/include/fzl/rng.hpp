#ifndef FZL_RNG_HPP
#define FZL_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fzl {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter) through the splitmix64 finalizer, so any draw can
// be reproduced on any platform without sequencing state. Streams split a
// single run seed between independent consumers (sampling, perturbations).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    static std::uint64_t mix(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::uint64_t bits(std::uint64_t counter) const
    {
        return mix(mix(mix(seed_) ^ stream_) ^ counter);
    }

    // uniform in [0,1), 53-bit mantissa
    double uniform(std::uint64_t counter) const
    {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // standard normal, Box-Muller on counters (2c, 2c+1)
    double normal(std::uint64_t counter) const
    {
        double u1 = uniform(2 * counter);
        double u2 = uniform(2 * counter + 1);
        if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

// Fixed stream ids, recorded in run metadata.
namespace rng_stream {
inline constexpr std::uint64_t kSampling = 1;
inline constexpr std::uint64_t kRatePerturbation = 2;
inline constexpr std::uint64_t kPropertyTests = 100;
} // namespace rng_stream

} // namespace fzl

#endif
