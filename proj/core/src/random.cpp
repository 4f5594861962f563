#include "medmarg/random.hpp"

#include "medmarg/normal.hpp"

namespace medmarg {

std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) noexcept {
    return mix_seed(mix_seed(seed) ^ k);
}

double uniform_open(Rng& rng) noexcept {
    // (i + 0.5) / 2^53 never hits 0 or 1.
    const std::uint64_t bits = rng() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
    return normal_quantile(uniform_open(rng));
}

}  // namespace medmarg
