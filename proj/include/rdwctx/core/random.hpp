#pragma once
/**
 * @file random.hpp
 * @brief Explicitly seeded random sources.
 *
 * Every stochastic operation takes a Seed by value; there is no global RNG.
 * Uniform and normal variates are produced from raw mt19937_64 output by our
 * own transforms so results do not depend on the standard library's
 * distribution implementations.
 */

#include <cmath>
#include <cstdint>
#include <random>

namespace rdwctx {

struct Seed {
    std::uint64_t value{0};
    constexpr bool operator==(const Seed&) const = default;
};

/// SplitMix64 finalizer. Used to derive independent sub-seeds.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic child seed for stream @p stream of @p parent.
[[nodiscard]] constexpr Seed derive_seed(Seed parent, std::uint64_t stream) noexcept
{
    return Seed{splitmix64(splitmix64(parent.value) ^ splitmix64(stream + 0x51ED27ULL))};
}

class Rng {
public:
    explicit Rng(Seed seed) : engine_(splitmix64(seed.value)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Von Mises variate (degrees) around @p mu_deg with concentration @p kappa.
    /// Best-Fisher rejection sampler.
    double von_mises_deg(double mu_deg, double kappa)
    {
        constexpr double pi = 3.14159265358979323846;
        if (kappa < 1e-8)
            return mu_deg + uniform(-180.0, 180.0);
        const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
        const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
        const double r = (1.0 + rho * rho) / (2.0 * rho);
        for (;;) {
            const double u1 = uniform(), u2 = uniform(), u3 = uniform();
            const double z = std::cos(pi * u1);
            const double f = (1.0 + r * z) / (r + z);
            const double c = kappa * (r - f);
            if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
                const double theta = (u3 > 0.5 ? 1.0 : -1.0) * std::acos(f);
                return mu_deg + theta * 180.0 / pi;
            }
        }
    }

    template <typename It>
    void shuffle(It first, It last)
    {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const auto j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_{0.0};
    bool has_spare_{false};
};

} // namespace rdwctx
