#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace testing_support {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t n = 0;

    double standard_error() const { return std::sqrt(variance / static_cast<double>(n)); }
};

template <class Draw>
Moments sample_moments(std::size_t n, Draw&& draw)
{
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = draw();
        const double delta = x - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (x - mean);
    }
    return {mean, m2 / static_cast<double>(n - 1), n};
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

/// Asymptotic KS critical value at level 0.01.
inline double ks_critical_001(std::size_t n)
{
    return 1.6276 / std::sqrt(static_cast<double>(n));
}

/// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

inline double ks_two_sample_critical_001(std::size_t n, std::size_t m)
{
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return 1.6276 * std::sqrt((nn + mm) / (nn * mm));
}

/// Pearson chi-square statistic against equal expected counts, and its
/// 0.99 quantile.
inline bool chi_square_uniform_ok(const std::vector<double>& counts)
{
    double total = 0.0;
    for (double c : counts)
        total += c;
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (double c : counts)
        stat += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return stat < boost::math::quantile(dist, 0.99);
}

/// Neumaier-compensated sum.
inline double accurate_sum(const std::vector<double>& xs)
{
    double sum = 0.0;
    double carry = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + carry;
}

inline double binomial_se(double p, std::size_t n)
{
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

} // namespace testing_support
