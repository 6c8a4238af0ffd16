#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace npsp {

    using Rng = std::mt19937_64;

    constexpr std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Derives an independent stream seed from a master seed and a key path,
    /// e.g. {command, env, start, trial}. Equal paths give equal seeds
    /// regardless of which worker asks.
    inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
    {
        std::uint64_t h = splitmix64(master);
        for (auto key : path)
            h = splitmix64(h ^ splitmix64(key + 0x632BE59BD9B4E019ULL));
        return h;
    }

    inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

    // Stream tags for derive_seed paths.
    namespace stream {
        inline constexpr std::uint64_t kCompare = 1;
        inline constexpr std::uint64_t kHeatmap = 2;
        inline constexpr std::uint64_t kEvolve = 3;
        inline constexpr std::uint64_t kTrial = 4;
        inline constexpr std::uint64_t kEvaluate = 5;
        inline constexpr std::uint64_t kBreed = 6;
        inline constexpr std::uint64_t kInitPopulation = 7;
    } // namespace stream

} // namespace npsp
