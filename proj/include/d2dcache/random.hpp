#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace d2dcache {

/// splitmix64 finaliser, used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Tags that keep the random draws of different model components apart.
enum class StreamRole : std::uint64_t {
    request = 1,
    geometry = 2,
    placement = 3,
    fading = 4,
    lifespan = 5,
    content = 6,
    size = 7,
};

/**
 * Seeded random stream.
 *
 * Wraps a 64-bit Mersenne twister; every continuous variate is produced from
 * the raw 64-bit output by explicit transforms so the sequence only depends
 * on the engine, not on the standard library's distribution implementations.
 * Poisson counts are the one exception (see poisson()).
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

    /// Substream keyed by a path of integers, e.g. (seed, point, iteration, role).
    static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    {
        std::uint64_t h = mix64(seed);
        for (std::uint64_t p : path)
            h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
        return RandomStream(h);
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Exponential with unit rate, strictly positive.
    double exponential() { return -std::log(uniform_open()); }

    /// Standard normal via Box-Muller; one output per call.
    double normal()
    {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Gamma(shape, scale = 1), Marsaglia-Tsang.
    double gamma(double shape)
    {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform_open(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x)
                return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

    /// Poisson count. Uses std::poisson_distribution (exact for large means);
    /// reproducible for a given standard library.
    std::uint64_t poisson(double mean)
    {
        if (mean <= 0.0)
            return 0;
        std::poisson_distribution<std::uint64_t> dist(mean);
        return dist(engine_);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace d2dcache
