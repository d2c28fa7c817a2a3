#ifndef PASIM_RNG_HPP
#define PASIM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pasim
{

/// Counter-based generator: every (seed, counter) pair maps to a fixed 64-bit value,
/// so draws do not depend on how the sample range is split across workers.
/// The mixing function is the SplitMix64 finalizer.
class CounterRng
{
public:
    explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const { return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53; }

    /// Exponential with the given mean.
    double exponential(std::uint64_t counter, double mean) const { return -mean * std::log1p(-uniform(counter)); }

    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
};

} // namespace pasim

#endif // PASIM_RNG_HPP
