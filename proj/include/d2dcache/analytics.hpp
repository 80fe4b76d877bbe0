#pragma once

#include "d2dcache/channel.hpp"
#include "d2dcache/content.hpp"
#include "d2dcache/error.hpp"
#include "d2dcache/mobility.hpp"
#include "d2dcache/placement.hpp"
#include "d2dcache/quadrature.hpp"
#include "d2dcache/random.hpp"
#include "d2dcache/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace d2dcache::analytics {

/// Probability estimate; standard_error is 0 for closed forms.
struct MetricEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t sample_count = 0;
};

/// Everything the closed-form service probability depends on.
struct AnalyticInputs {
    double density = 2.5e-3; // transmitters per m^2
    channel::RadioParams radio;
    channel::FadingLaw fading = channel::ExponentialFading{1.0};
    mobility::LifespanLaw lifespan = mobility::ExponentialLifespan{100.0};
    placement::PlacementPolicy placement;
    content::ContentCatalogue catalogue;

    /// `with_sizes = false` skips the size vector (expected metric).
    void validate(bool with_sizes = true) const
    {
        d2dcache::detail::require(std::isfinite(density) && density >= 0.0, "density must be finite and >= 0");
        radio.validate();
        channel::validate(fading);
        mobility::validate(lifespan);
        placement.validate();
        d2dcache::detail::require(placement.size() == catalogue.popularity.size(),
                        "placement and popularity vectors differ in length");
        if (with_sizes)
            catalogue.validate();
    }
};

inline constexpr double kMaxSpectralLoad = 1024.0;

namespace detail {

/// ln(2^y - 1) for y > 0 given y_ln2 = y * ln 2, without overflow.
inline double log_pow2_minus_one(double y_ln2)
{
    if (y_ln2 > 30.0)
        return y_ln2 + std::log1p(-std::exp(-y_ln2));
    return std::log(std::expm1(y_ln2));
}

/// (2^(z / (W s)) - 1)^(-2/alpha), the completion factor for lifespan s.
inline double completion_factor(double bits_per_hz, double s, double alpha)
{
    if (!(s > 0.0))
        return 0.0;
    const double load = bits_per_hz / s;
    if (load > kMaxSpectralLoad)
        return 0.0;
    return std::exp(-(2.0 / alpha) * log_pow2_minus_one(load * std::numbers::ln2));
}

} // namespace detail

/// I_T for a fixed lifespan: (2^(z / (W tau)) - 1)^(-2/alpha); 0 once
/// z / (W tau) exceeds 1024.
inline double lifespan_moment_fixed(double size_bits, double lifespan, double bandwidth, double alpha)
{
    d2dcache::detail::require(size_bits > 0.0 && lifespan > 0.0 && bandwidth > 0.0,
                              "lifespan_moment_fixed: z, tau and W must be > 0");
    return detail::completion_factor(size_bits / bandwidth, lifespan, alpha);
}

/**
 * I_T for an exponential lifespan with mean tau:
 *   int_0^inf (1/tau) e^(-s/tau) (2^(z/(W s)) - 1)^(-2/alpha) ds.
 *
 * Split at c = z/W where the completion factor equals 1. The head [0, c] is
 * integrated directly. The tail is mapped by s = c - tau ln(1 - v), which
 * absorbs the exponential weight: tail = e^(-c/tau) int_0^1 factor(s(v)) dv.
 */
inline double lifespan_moment_exponential(double size_bits, double lifespan, double bandwidth,
                                          double alpha, double relative_tolerance = 1e-8)
{
    d2dcache::detail::require(size_bits > 0.0 && lifespan > 0.0 && bandwidth > 0.0,
                              "lifespan_moment_exponential: z, tau and W must be > 0");
    const double c = size_bits / bandwidth;
    quadrature::Tolerance tol;
    tol.relative = 0.1 * relative_tolerance;

    const double tail_weight = std::exp(-c / lifespan);
    double tail = 0.0;
    if (tail_weight > 0.0) {
        auto mapped = [&](double v) {
            return detail::completion_factor(c, c - lifespan * std::log1p(-v), alpha);
        };
        tail = tail_weight * quadrature::integrate(mapped, 0.0, 1.0, tol).value;
    }
    auto head_integrand = [&](double s) {
        const double f = detail::completion_factor(c, s, alpha);
        return f == 0.0 ? 0.0 : f * std::exp(-s / lifespan) / lifespan;
    };
    tol.absolute = 0.1 * relative_tolerance * tail;
    const double head = quadrature::integrate(head_integrand, 0.0, c, tol).value;
    return head + tail;
}

inline double lifespan_moment(const mobility::LifespanLaw& law, double size_bits, double bandwidth,
                              double alpha)
{
    return std::visit(overloaded{
                          [&](const mobility::FixedLifespan& l) {
                              return lifespan_moment_fixed(size_bits, l.mean, bandwidth, alpha);
                          },
                          [&](const mobility::ExponentialLifespan& l) {
                              return lifespan_moment_exponential(size_bits, l.mean, bandwidth, alpha);
                          },
                      },
                      law);
}

/**
 * Closed-form evaluator. Caches the coverage constant
 *   kappa = (P / N)^(2/alpha) E[H^(2/alpha)],
 * so that P_srv,j = 1 - exp(-pi lambda b_j kappa I_T(z_j)).
 */
class ServiceModel {
public:
    explicit ServiceModel(const AnalyticInputs& inputs, bool with_sizes = true) : inputs_(inputs)
    {
        inputs_.validate(with_sizes);
        const double alpha = inputs_.radio.pathloss_exponent;
        kappa_ = std::pow(inputs_.radio.snr_gain(), 2.0 / alpha) *
                 channel::fading_moment(inputs_.fading, alpha);
    }

    const AnalyticInputs& inputs() const { return inputs_; }
    double coverage_constant() const { return kappa_; }

    double lifespan_factor(double size_bits) const
    {
        return lifespan_moment(inputs_.lifespan, size_bits, inputs_.radio.bandwidth,
                               inputs_.radio.pathloss_exponent);
    }

    /// Success probability of object j given its size and lifespan factor I_T.
    double success_given_factor(std::size_t j, double it) const
    {
        const double b = inputs_.placement[j];
        if (b <= 0.0)
            return 0.0;
        const double mean_servers = std::numbers::pi * inputs_.density * b * kappa_ * it;
        return std::clamp(-std::expm1(-mean_servers), 0.0, 1.0);
    }

    double per_object(std::size_t j, double size_bits) const
    {
        if (inputs_.placement[j] <= 0.0)
            return 0.0;
        return success_given_factor(j, lifespan_factor(size_bits));
    }

    double per_object(std::size_t j) const { return per_object(j, inputs_.catalogue.sizes[j]); }

    double total() const
    {
        double sum = 0.0;
        for (std::size_t j = 0; j < inputs_.placement.size(); ++j)
            sum += inputs_.catalogue.popularity[j] * per_object(j);
        return std::clamp(sum, 0.0, 1.0);
    }

    /// Sum_j a_j P_srv,j when every object has the same size.
    double total_with_common_size(double size_bits) const
    {
        const double it = lifespan_factor(size_bits);
        double sum = 0.0;
        for (std::size_t j = 0; j < inputs_.placement.size(); ++j)
            sum += inputs_.catalogue.popularity[j] * success_given_factor(j, it);
        return std::clamp(sum, 0.0, 1.0);
    }

    /// Upper bound: popularity mass of the objects with b_j > 0.
    double cached_mass() const
    {
        double sum = 0.0;
        for (std::size_t j = 0; j < inputs_.placement.size(); ++j)
            if (inputs_.placement[j] > 0.0)
                sum += inputs_.catalogue.popularity[j];
        return sum;
    }

private:
    AnalyticInputs inputs_;
    double kappa_ = 0.0;
};

inline MetricEstimate per_object_success(const AnalyticInputs& inputs, std::size_t j)
{
    d2dcache::detail::require(j < inputs.placement.size(), "object index out of range");
    return {ServiceModel(inputs).per_object(j), 0.0, 0};
}

inline MetricEstimate total_success(const AnalyticInputs& inputs)
{
    return {ServiceModel(inputs).total(), 0.0, 0};
}

/**
 * Expected total success over i.i.d. sizes Z ~ size_law.
 *
 * Monte Carlo over Z with common draws across objects: each draw Z_k gives
 * Y_k = sum_j a_j P_srv,j(Z_k), an unbiased estimate by linearity. The
 * standard error is the sample standard deviation of Y over sqrt(n).
 * The catalogue's size vector is ignored.
 */
inline MetricEstimate expected_success(const AnalyticInputs& inputs, const content::SizeLaw& size_law,
                                       std::size_t mc_samples, RandomStream& rng)
{
    d2dcache::detail::require(mc_samples >= 1000, "expected_success needs at least 1000 size samples");
    content::validate(size_law);
    const ServiceModel model(inputs, false);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < mc_samples; ++k) {
        const double z = content::sample_size(size_law, rng);
        const double y = model.total_with_common_size(z);
        const double delta = y - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (y - mean);
    }
    const double n = static_cast<double>(mc_samples);
    const double variance = m2 / (n - 1.0);
    return {std::clamp(mean, 0.0, 1.0), std::sqrt(variance / n), mc_samples};
}

/**
 * Radius scale sqrt(kappa * max_j I_T(z_j)) of the region that actually
 * serves requests. A window whose half width is within a factor 10 of this
 * scale cuts off a noticeable part of the serving transmitters.
 */
inline double coverage_radius_scale(const AnalyticInputs& inputs)
{
    const ServiceModel model(inputs);
    double max_it = 0.0;
    for (std::size_t j = 0; j < inputs.placement.size(); ++j)
        if (inputs.placement[j] > 0.0)
            max_it = std::max(max_it, model.lifespan_factor(inputs.catalogue.sizes[j]));
    return std::sqrt(model.coverage_constant() * max_it);
}

inline bool window_too_small(const AnalyticInputs& inputs, double half_width)
{
    return 10.0 * coverage_radius_scale(inputs) >= half_width;
}

} // namespace d2dcache::analytics
