#pragma once

#include "d2dcache/error.hpp"
#include "d2dcache/random.hpp"
#include "d2dcache/util.hpp"

#include <cmath>
#include <string>
#include <variant>

namespace d2dcache::mobility {

/// Every transmitter keeps its position for exactly `mean` seconds.
struct FixedLifespan {
    double mean = 100.0;
};

/// Lifespan ~ Exponential with the given mean (rate 1/mean).
struct ExponentialLifespan {
    double mean = 100.0;
};

using LifespanLaw = std::variant<FixedLifespan, ExponentialLifespan>;

inline double mean_lifespan(const LifespanLaw& law)
{
    return std::visit([](const auto& l) { return l.mean; }, law);
}

/// Same law family with a different mean.
inline LifespanLaw with_mean(const LifespanLaw& law, double mean)
{
    return std::visit([&](auto l) -> LifespanLaw { l.mean = mean; return l; }, law);
}

inline std::string name(const LifespanLaw& law)
{
    return std::holds_alternative<FixedLifespan>(law) ? "fixed" : "exponential";
}

inline void validate(const LifespanLaw& law)
{
    const double m = mean_lifespan(law);
    detail::require(std::isfinite(m) && m > 0.0, "mean lifespan must be finite and > 0");
}

inline double sample_lifespan(const LifespanLaw& law, RandomStream& rng)
{
    return std::visit(overloaded{
                          [](const FixedLifespan& l) { return l.mean; },
                          [&](const ExponentialLifespan& l) { return l.mean * rng.exponential(); },
                      },
                      law);
}

/// A value t with Pr(T > t) <= tail.
inline double lifespan_upper_quantile(const LifespanLaw& law, double tail)
{
    return std::visit(overloaded{
                          [](const FixedLifespan& l) { return l.mean; },
                          [&](const ExponentialLifespan& l) { return -l.mean * std::log(tail); },
                      },
                      law);
}

} // namespace d2dcache::mobility
