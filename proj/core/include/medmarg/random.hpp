#pragma once

#include <cstdint>
#include <random>

namespace medmarg {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

// Seed of substream `k` under master seed `seed`, i.e. mix(mix(seed) ^ k).
// Stream 0 is reserved for the primary (prior) draws.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) noexcept;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(substream_seed(seed, stream));
}

// Uniform draw on the open interval (0,1) with 53 random bits. Platform
// independent, unlike std::uniform_real_distribution.
double uniform_open(Rng& rng) noexcept;

// Standard normal draw by inversion.
double standard_normal(Rng& rng);

}  // namespace medmarg
