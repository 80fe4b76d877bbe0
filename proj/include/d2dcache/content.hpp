#pragma once

#include "d2dcache/error.hpp"
#include "d2dcache/random.hpp"
#include "d2dcache/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace d2dcache::content {

/// Zipf request law over F objects, index 0 is the most popular.
struct PopularityLaw {
    double exponent = 0.0;
    std::vector<double> probabilities;

    std::size_t size() const { return probabilities.size(); }
    double operator[](std::size_t j) const { return probabilities[j]; }

    /// Sum of the first n probabilities.
    double head_mass(std::size_t n) const
    {
        double s = 0.0;
        for (std::size_t j = 0; j < std::min(n, size()); ++j)
            s += probabilities[j];
        return s;
    }
};

inline PopularityLaw zipf_popularity(std::size_t count, double exponent)
{
    detail::require(count >= 2, "catalogue size must be >= 2");
    detail::require(std::isfinite(exponent) && exponent >= 0.0, "zipf exponent must be >= 0");
    PopularityLaw law;
    law.exponent = exponent;
    law.probabilities.resize(count);
    for (std::size_t j = 0; j < count; ++j)
        law.probabilities[j] = std::pow(static_cast<double>(j + 1), -exponent);
    // Compensated sum, smallest terms first.
    double norm = 0.0;
    double carry = 0.0;
    for (std::size_t j = count; j-- > 0;) {
        const double x = law.probabilities[j];
        const double t = norm + x;
        carry += std::abs(norm) >= std::abs(x) ? (norm - t) + x : (x - t) + norm;
        norm = t;
    }
    norm += carry;
    for (double& a : law.probabilities)
        a /= norm;
    return law;
}

/// Index j drawn with probability a_j, by inverse CDF on a cumulative table.
class RequestSampler {
public:
    explicit RequestSampler(const PopularityLaw& law)
    {
        cumulative_.resize(law.size());
        double s = 0.0;
        for (std::size_t j = 0; j < law.size(); ++j) {
            s += law[j];
            cumulative_[j] = s;
        }
    }

    std::size_t operator()(RandomStream& rng) const
    {
        const double u = rng.uniform() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                     cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

// File-size laws, sizes in bits.
struct UniformSize {
    double min = 5e7;
    double max = 2e9;
};
struct ExponentialSize {
    double rate = 1e-9;
};
/// Tail (scale / z)^shape for z >= scale.
struct ParetoSize {
    double shape = 20.0 / 19.0;
    double scale = 5e7;
};
/// Tail exp(-(z / scale)^shape).
struct WeibullSize {
    double scale = 276.0;
    double shape = 0.1;
};
/// ln Z ~ N(mu, sigma^2); optional truncation to [lower, upper] by rejection.
struct LogNormalSize {
    double mu = 0.0;
    double sigma = 1.0;
    std::optional<double> lower;
    std::optional<double> upper;
};

using SizeLaw = std::variant<UniformSize, ExponentialSize, ParetoSize, WeibullSize, LogNormalSize>;

inline std::string name(const SizeLaw& law)
{
    return std::visit(overloaded{
                          [](const UniformSize&) { return std::string("uniform"); },
                          [](const ExponentialSize&) { return std::string("exponential"); },
                          [](const ParetoSize&) { return std::string("pareto"); },
                          [](const WeibullSize&) { return std::string("weibull"); },
                          [](const LogNormalSize&) { return std::string("lognormal"); },
                      },
                      law);
}

inline void validate(const SizeLaw& law)
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    std::visit(overloaded{
                   [&](const UniformSize& s) {
                       detail::require(positive(s.min) && positive(s.max) && s.min <= s.max,
                                       "uniform size law needs 0 < min <= max");
                   },
                   [&](const ExponentialSize& s) {
                       detail::require(positive(s.rate), "exponential size rate must be > 0");
                   },
                   [&](const ParetoSize& s) {
                       detail::require(positive(s.shape) && positive(s.scale),
                                       "pareto shape and scale must be > 0");
                   },
                   [&](const WeibullSize& s) {
                       detail::require(positive(s.shape) && positive(s.scale),
                                       "weibull size shape and scale must be > 0");
                   },
                   [&](const LogNormalSize& s) {
                       detail::require(std::isfinite(s.mu), "log-normal size mu must be finite");
                       detail::require(positive(s.sigma), "log-normal size sigma must be > 0");
                       if (s.lower && s.upper)
                           detail::require(*s.lower < *s.upper,
                                           "log-normal truncation needs lower < upper");
                   },
               },
               law);
}

/// One draw by inverse-CDF transform of a single open uniform (log-normal:
/// exponentiated Gaussian, rejection when truncated).
inline double sample_size(const SizeLaw& law, RandomStream& rng)
{
    return std::visit(
        overloaded{
            [&](const UniformSize& s) { return s.min + (s.max - s.min) * rng.uniform(); },
            [&](const ExponentialSize& s) { return -std::log(rng.uniform_open()) / s.rate; },
            [&](const ParetoSize& s) { return s.scale * std::pow(rng.uniform_open(), -1.0 / s.shape); },
            [&](const WeibullSize& s) {
                return s.scale * std::pow(-std::log(rng.uniform_open()), 1.0 / s.shape);
            },
            [&](const LogNormalSize& s) {
                const double lo = s.lower.value_or(0.0);
                const double hi = s.upper.value_or(std::numeric_limits<double>::infinity());
                for (;;) {
                    const double z = std::exp(s.mu + s.sigma * rng.normal());
                    if (z >= lo && z <= hi && z > 0.0)
                        return z;
                }
            },
        },
        law);
}

inline std::vector<double> sample_sizes(const SizeLaw& law, std::size_t count, RandomStream& rng)
{
    validate(law);
    std::vector<double> sizes(count);
    for (double& z : sizes)
        z = sample_size(law, rng);
    return sizes;
}

/// Analytic E[Z]. Throws ConfigError for Pareto with shape <= 1 and for a
/// truncated log-normal (no closed form used here).
inline double mean_size(const SizeLaw& law)
{
    validate(law);
    return std::visit(
        overloaded{
            [](const UniformSize& s) { return 0.5 * (s.min + s.max); },
            [](const ExponentialSize& s) { return 1.0 / s.rate; },
            [](const ParetoSize& s) {
                if (s.shape <= 1.0)
                    throw ConfigError("pareto size law has infinite mean for shape <= 1");
                return s.scale * s.shape / (s.shape - 1.0);
            },
            [](const WeibullSize& s) { return s.scale * std::tgamma(1.0 + 1.0 / s.shape); },
            [](const LogNormalSize& s) {
                if (s.lower || s.upper)
                    throw ConfigError("mean_size: truncated log-normal has no closed-form mean here");
                return std::exp(s.mu + 0.5 * s.sigma * s.sigma);
            },
        },
        law);
}

enum class SizeOrdering {
    independent,
    increasing, ///< z_1 <= z_2 <= ... (most popular is smallest)
    decreasing, ///< z_1 >= z_2 >= ... (most popular is largest)
};

inline std::string to_string(SizeOrdering mode)
{
    switch (mode) {
    case SizeOrdering::independent: return "independent";
    case SizeOrdering::increasing: return "increasing";
    case SizeOrdering::decreasing: return "decreasing";
    }
    return "?";
}

struct ContentCatalogue {
    PopularityLaw popularity;
    std::vector<double> sizes;
    SizeOrdering ordering = SizeOrdering::independent;

    std::size_t size() const { return sizes.size(); }

    void validate() const
    {
        detail::require(popularity.size() == sizes.size(),
                        "catalogue popularity and size vectors differ in length");
        for (double z : sizes)
            detail::require(std::isfinite(z) && z > 0.0, "file sizes must be finite and > 0");
    }
};

inline ContentCatalogue make_catalogue(PopularityLaw popularity, std::vector<double> sizes)
{
    ContentCatalogue c{std::move(popularity), std::move(sizes), SizeOrdering::independent};
    c.validate();
    return c;
}

/// Permutes the sizes against the popularity ranks; popularity untouched.
inline ContentCatalogue apply_ordering(ContentCatalogue catalogue, SizeOrdering mode)
{
    switch (mode) {
    case SizeOrdering::independent:
        break;
    case SizeOrdering::increasing:
        std::sort(catalogue.sizes.begin(), catalogue.sizes.end());
        break;
    case SizeOrdering::decreasing:
        std::sort(catalogue.sizes.begin(), catalogue.sizes.end(), std::greater<>());
        break;
    }
    catalogue.ordering = mode;
    return catalogue;
}

/// Largest n sizes, descending.
inline std::vector<double> top_sizes(std::span<const double> sizes, std::size_t n)
{
    std::vector<double> sorted(sizes.begin(), sizes.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    sorted.resize(std::min(n, sorted.size()));
    return sorted;
}

/// CSV with header index,popularity,size_bits; index is 1-based.
inline void write_catalogue_csv(std::ostream& out, const ContentCatalogue& catalogue)
{
    out << "index,popularity,size_bits\n";
    for (std::size_t j = 0; j < catalogue.size(); ++j)
        out << (j + 1) << ',' << format_number(catalogue.popularity[j]) << ','
            << format_number(catalogue.sizes[j]) << '\n';
}

} // namespace d2dcache::content
