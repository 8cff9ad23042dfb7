#pragma once

// Counter-based uniform stream.
//
// Algorithm (fixed; any port must match it bit for bit):
//
//   gamma    = 0x9E3779B97F4A7C15
//   mix64(z) : z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//              z ^= z >> 27; z *= 0x94D049BB133111EB;
//              z ^= z >> 31
//   word(seed, i)    = mix64(seed + (i + 1) * gamma)          (mod 2^64)
//   uniform(seed, i) = ((word(seed, i) >> 12) + 0.5) * 2^-52   in (0, 1)
//
// word(seed, 0), word(seed, 1), ... is exactly the SplitMix64 sequence started
// from state `seed`, but every element is addressable without the preceding
// ones. The 52-bit uniform grid keeps both u and 1 - u exactly representable,
// so inverse-transform sampling never sees 0 or 1.
//
// Stream derivation:
//   split(seed, a, b) = mix64(mix64(seed ^ mix64(a + gamma)) + (b + 1) * gamma)

#include <cstdint>

namespace esr::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t word(std::uint64_t seed, std::uint64_t i) noexcept {
    return mix64(seed + (i + 1) * kGamma);
}

constexpr double to_unit(std::uint64_t w) noexcept {
    return (static_cast<double>(w >> 12) + 0.5) * 0x1.0p-52;
}

constexpr double uniform(std::uint64_t seed, std::uint64_t i) noexcept {
    return to_unit(word(seed, i));
}

/// Derives an independent stream seed from a parent seed and two indices
/// (e.g. sample size and trial number).
constexpr std::uint64_t split(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(mix64(seed ^ mix64(a + kGamma)) + (b + 1) * kGamma);
}

/// Sequential view over a stream; convenient when a consumer draws an
/// unknown number of variates.
class Stream {
public:
    explicit constexpr Stream(std::uint64_t seed) noexcept : seed_(seed) {}

    constexpr double next_uniform() noexcept { return uniform(seed_, counter_++); }
    constexpr std::uint64_t next_word() noexcept { return word(seed_, counter_++); }
    constexpr std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace esr::rng
