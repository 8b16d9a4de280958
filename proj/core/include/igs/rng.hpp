#pragma once

#include <cstdint>
#include <limits>

namespace igs {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for an independent stream; depends only on (seed, stream_id).
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream_id)
{
    return mix64(mix64(seed) ^ mix64(stream_id + 0x632be59bd9b4e019ULL));
}

/**
 * Counter-based generator: the k-th draw is mix64(key + k * golden), so any
 * position of a stream is a pure function of (key, k). Satisfies
 * UniformRandomBitGenerator for use with <random> distributions.
 */
class CounterRng
{
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed = 0) : key_(mix64(seed)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Named stream identifiers used by the simulation and cross-validation code.
namespace streams {
inline constexpr std::uint64_t design = 1;
inline constexpr std::uint64_t coefficients = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t response = 4;
inline constexpr std::uint64_t priority = 5;
inline constexpr std::uint64_t folds = 6;
inline constexpr std::uint64_t replication = 7;
} // namespace streams

} // namespace igs
