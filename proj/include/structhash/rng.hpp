#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace structhash::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Steele, Lea & Flood, "Fast splittable pseudorandom
// number generators", OOPSLA 2014). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based SplitMix64 stream: output i is mix64(seed + (i+1)*kGolden),
// so any element of the stream can be recomputed independently and two
// streams with different seeds never share state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

// Derives the seed of an independent substream. Stream ids are small
// integers; the double mix decorrelates (seed, id) pairs.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
    return mix64(seed ^ mix64(stream_id + kGolden));
}

// Fixed stream ids used by the hashing pipeline and the Monte Carlo driver.
// Documented so that independent implementations can reproduce runs given
// the same master seed.
enum : std::uint64_t {
    kStreamPool = 1,
    kStreamDiagR = 2,
    kStreamDiagD = 3,
    kStreamPerm = 4,
    kStreamVectors = 5,
    kStreamTrials = 6,
};

// Uniform double in [0, 1), 53 random bits.
inline double next_unit(SplitMix64& g) {
    return static_cast<double>(g.next() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe as a log() argument.
inline double next_unit_pos(SplitMix64& g) {
    return static_cast<double>((g.next() >> 11) + 1) * 0x1.0p-53;
}

// Unbiased integer in [0, m) by rejection.
inline std::uint64_t next_bounded(SplitMix64& g, std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("next_bounded: m must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
    std::uint64_t x;
    do {
        x = g.next();
    } while (x >= limit);
    return x % m;
}

// Standard normal draws via Box-Muller over the SplitMix64 stream. Two
// uniforms per pair; the second value of each pair is cached.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit_pos(gen_);
        const double u2 = next_unit(gen_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    SplitMix64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Uniform random permutation of {0,...,m-1} (Fisher-Yates).
inline std::vector<std::uint32_t> random_permutation(std::size_t m, SplitMix64& g) {
    std::vector<std::uint32_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = m; i > 1; --i) {
        const std::uint64_t j = next_bounded(g, i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace structhash::rng
