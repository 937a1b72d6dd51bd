#pragma once

// Seedable 64-bit generator with cheap substream derivation.
//
// Every stochastic routine takes an Rng&; parallel work derives independent
// substreams with Rng::substream(seed, id) so results do not depend on the
// order in which tasks run.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace stepcast {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace detail {
__extension__ using u128 = unsigned __int128;
}  // namespace detail

/// xoshiro256** seeded through SplitMix64.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept { reseed(seed); }

    /// Generator for stream `id` under a master seed.
    static Rng substream(std::uint64_t seed, std::uint64_t id) noexcept {
        std::uint64_t s = seed;
        std::uint64_t mixed = splitmix64(s) ^ (id * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
        return Rng(mixed);
    }

    void reseed(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Uniform integer on [0, n). Lemire's nearly-divisionless method.
    std::uint64_t below(std::uint64_t n) noexcept {
        detail::u128 m = static_cast<detail::u128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<detail::u128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(*this); }

    double gamma(double shape, double rate) {
        return std::gamma_distribution<double>(shape, 1.0 / rate)(*this);
    }

    double beta(double a, double b) {
        const double x = gamma(a, 1.0);
        const double y = gamma(b, 1.0);
        const double s = x + y;
        // Both gammas underflow for very small shapes; fall back on the
        // Bernoulli limit of Beta(a, b) as a, b -> 0.
        if (s == 0.0) return uniform() < a / (a + b) ? 1.0 : 0.0;
        return x / s;
    }

    std::uint64_t binomial(std::uint64_t n, double p) {
        if (p <= 0.0 || n == 0) return 0;
        if (p >= 1.0) return n;
        return std::binomial_distribution<std::uint64_t>(n, p)(*this);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace stepcast
