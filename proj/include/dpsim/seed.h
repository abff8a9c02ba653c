#ifndef DPSIM_SEED_H
#define DPSIM_SEED_H

#include <cstdint>

#include "dpsim/address.h"

namespace dpsim {

// Component kinds fed into seed derivation. Values are part of the output
// format: renumbering them changes every simulated device.
enum class ComponentKind : std::uint64_t {
    SaOffset = 1,
    CellOffset = 2,
    CellNoise = 3,
    CellTau = 4,
    CellCap = 5,
    AgingSa = 6,
    AgingCell = 7,
    LatencyWeak = 8,
    LatencyStrength = 9,
    LatencyRow = 10,
    LatencyTrial = 11,
    Sampling = 12,
    McDraw = 13,
};

// splitmix64 finalizer (bijective on 64-bit words).
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix_step(std::uint64_t h, std::uint64_t v)
{
    return mix64(h + 0x9e3779b97f4a7c15ull * (v + 1));
}

// The chain is exposed so hot loops can cache the prefix up to the row.
struct SeedChain {
    static constexpr std::uint64_t start(std::uint64_t master, ComponentKind kind)
    {
        return mix64(master ^ mix64(static_cast<std::uint64_t>(kind) * 0xd1b54a32d192ed03ull));
    }
    static constexpr std::uint64_t row_prefix(std::uint64_t h, const Address& a)
    {
        h = mix_step(h, a.channel);
        h = mix_step(h, a.rank);
        h = mix_step(h, a.bank);
        h = mix_step(h, a.subarray);
        return mix_step(h, a.row);
    }
    static constexpr std::uint64_t finish(std::uint64_t row_prefix, std::uint64_t column,
                                          std::uint64_t trial)
    {
        return mix_step(mix_step(row_prefix, column), trial);
    }
};

constexpr std::uint64_t derive_component_seed(std::uint64_t master, ComponentKind kind,
                                              const Address& a, std::uint64_t trial = 0)
{
    return SeedChain::finish(SeedChain::row_prefix(SeedChain::start(master, kind), a), a.column,
                             trial);
}

// Uniform in the open interval (0, 1) from the top 52 bits.
constexpr double to_uniform(std::uint64_t h)
{
    return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

// Standard normal by inversion; |z| < 8.3 (u >= 2^-53) for every possible input.
double to_normal(std::uint64_t h);
double normal_quantile(double u);
double normal_cdf(double z);

// Unbiased enough for sampling indices below 2^32 (multiply-shift).
constexpr std::uint64_t to_index(std::uint64_t h, std::uint64_t n)
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(h) * n) >> 64);
}

}  // namespace dpsim

#endif
