// rng.hpp
//
// Counter-based splittable random streams for parallel Monte Carlo.
//
// RandomSource is a xoshiro256++ generator whose state is derived from a
// (root key, stream index) pair through a SplitMix64-style mixer. Substreams
// derived from distinct indices are statistically independent, so replica i
// can always be given substream(i) and results do not depend on scheduling.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace bbmlab {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for key mixing and
// state expansion, never as the bulk generator.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key_(derive_key(seed, stream)) {
        std::uint64_t sm = key_;
        for (auto& w : state_) {
            sm = detail::mix64(sm);
            w = sm;
        }
        // xoshiro must not start from the all-zero state
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[3] = 1;
    }

    // Child stream fully determined by (this stream's key, index).
    [[nodiscard]] RandomSource substream(std::uint64_t index) const {
        return RandomSource(key_, index + 1);
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result =
            detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe under log().
    double uniform_pos() noexcept { return 1.0 - uniform(); }

    double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }

    // Standard normal, Marsaglia polar method with one cached spare.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Exponential with unit rate.
    double exponential() noexcept { return -std::log(uniform_pos()); }

    double exponential(double rate) noexcept { return exponential() / rate; }

    // Exact Poisson sample. Knuth's product method on chunks of mean <= 40
    // (Poisson additivity keeps the split exact for any mean).
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be >= 0");
        std::uint64_t total = 0;
        while (mean > 40.0) {
            total += poisson_knuth(40.0);
            mean -= 40.0;
        }
        return total + poisson_knuth(mean);
    }

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

private:
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
        return detail::mix64(seed ^ detail::mix64(stream * 0xA3EC647659359ACDULL + 0x12E15E35B500F16EULL));
    }

    std::uint64_t poisson_knuth(double mean) noexcept {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform_pos();
        while (prod > limit) {
            ++k;
            prod *= uniform_pos();
        }
        return k;
    }

    std::uint64_t key_;
    std::uint64_t state_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bbmlab
