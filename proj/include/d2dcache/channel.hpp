#pragma once

#include "d2dcache/error.hpp"
#include "d2dcache/quadrature.hpp"
#include "d2dcache/random.hpp"
#include "d2dcache/util.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

namespace d2dcache::channel {

/// How the noise figure N relates to the band.
enum class NoiseReference {
    in_band,   ///< N is a spectral density; noise power is N * W.
    per_hertz, ///< P and N are both per-Hz quantities; SNR = P / N.
};

struct RadioParams {
    double power = 0.5;               // W (or W/Hz under per_hertz)
    double noise = 1e-11;             // W/Hz
    double bandwidth = 5e6;           // Hz
    double pathloss_exponent = 4.0;   // alpha
    NoiseReference noise_reference = NoiseReference::in_band;

    void validate() const
    {
        d2dcache::detail::require(std::isfinite(power) && power > 0.0, "radio power must be > 0");
        d2dcache::detail::require(std::isfinite(noise) && noise > 0.0, "radio noise must be > 0");
        d2dcache::detail::require(std::isfinite(bandwidth) && bandwidth > 0.0, "radio bandwidth must be > 0");
        d2dcache::detail::require(std::isfinite(pathloss_exponent) && pathloss_exponent > 2.0,
                        "pathloss_exponent must be > 2");
    }

    double noise_power() const
    {
        return noise_reference == NoiseReference::in_band ? noise * bandwidth : noise;
    }

    /// SNR of a unit-fading link at unit distance.
    double snr_gain() const { return power / noise_power(); }
};

// Fading laws. Parameterisations follow the usual densities:
//   Exponential  rate * exp(-rate h)
//   LogNormal    ln H ~ N(mu, sigma^2); sigma = 0 is the point mass e^mu
//   Weibull      (shape/scale)(h/scale)^(shape-1) exp(-(h/scale)^shape)
//   Nakagami     2 m^m / (Gamma(m) omega^m) h^(2m-1) exp(-m h^2 / omega)
//   Rice         (h/sigma^2) I0(h nu / sigma^2) exp(-(h^2 + nu^2) / (2 sigma^2))
struct ExponentialFading { double rate = 1.0; };
struct LogNormalFading { double mu = 0.0; double sigma = 1.0; };
struct WeibullFading { double scale = 1.0; double shape = 1.0; };
struct NakagamiFading { double m = 1.0; double omega = 1.0; };
struct RiceFading { double nu = 1.0; double sigma = 1.0; };

using FadingLaw =
    std::variant<ExponentialFading, LogNormalFading, WeibullFading, NakagamiFading, RiceFading>;

inline void validate(const FadingLaw& law)
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    std::visit(overloaded{
                   [&](const ExponentialFading& f) {
                       d2dcache::detail::require(positive(f.rate), "exponential fading rate must be > 0");
                   },
                   [&](const LogNormalFading& f) {
                       d2dcache::detail::require(std::isfinite(f.mu), "log-normal fading mu must be finite");
                       d2dcache::detail::require(std::isfinite(f.sigma) && f.sigma >= 0.0,
                                       "log-normal fading sigma must be >= 0");
                   },
                   [&](const WeibullFading& f) {
                       d2dcache::detail::require(positive(f.scale) && positive(f.shape),
                                       "weibull fading scale and shape must be > 0");
                   },
                   [&](const NakagamiFading& f) {
                       d2dcache::detail::require(std::isfinite(f.m) && f.m >= 0.5,
                                       "nakagami fading m must be >= 0.5");
                       d2dcache::detail::require(positive(f.omega), "nakagami fading omega must be > 0");
                   },
                   [&](const RiceFading& f) {
                       d2dcache::detail::require(std::isfinite(f.nu) && f.nu >= 0.0,
                                       "rice fading nu must be >= 0");
                       d2dcache::detail::require(positive(f.sigma), "rice fading sigma must be > 0");
                   },
               },
               law);
}

inline std::string name(const FadingLaw& law)
{
    return std::visit(overloaded{
                          [](const ExponentialFading&) { return std::string("exponential"); },
                          [](const LogNormalFading&) { return std::string("lognormal"); },
                          [](const WeibullFading&) { return std::string("weibull"); },
                          [](const NakagamiFading&) { return std::string("nakagami"); },
                          [](const RiceFading&) { return std::string("rice"); },
                      },
                      law);
}

inline double sample_fading(const FadingLaw& law, RandomStream& rng)
{
    return std::visit(
        overloaded{
            [&](const ExponentialFading& f) { return rng.exponential() / f.rate; },
            [&](const LogNormalFading& f) { return std::exp(f.mu + f.sigma * rng.normal()); },
            [&](const WeibullFading& f) {
                return f.scale * std::pow(rng.exponential(), 1.0 / f.shape);
            },
            [&](const NakagamiFading& f) { return std::sqrt(rng.gamma(f.m) * f.omega / f.m); },
            [&](const RiceFading& f) {
                const double x = f.nu + f.sigma * rng.normal();
                const double y = f.sigma * rng.normal();
                return std::hypot(x, y);
            },
        },
        law);
}

namespace detail {

inline double log_bessel_i0(double x)
{
    if (x < 600.0)
        return std::log(std::cyl_bessel_i(0.0, x));
    // Large-argument expansion of I0.
    return x - 0.5 * std::log(2.0 * std::numbers::pi * x) +
           std::log1p(1.0 / (8.0 * x) + 9.0 / (128.0 * x * x));
}

} // namespace detail

/// Probability density of H; used by the numerical moment.
inline double fading_density(const FadingLaw& law, double h)
{
    if (!(h > 0.0) || !std::isfinite(h))
        return 0.0;
    return std::visit(
        overloaded{
            [&](const ExponentialFading& f) { return f.rate * std::exp(-f.rate * h); },
            [&](const LogNormalFading& f) {
                const double d = (std::log(h) - f.mu) / f.sigma;
                return std::exp(-0.5 * d * d) / (h * f.sigma * std::sqrt(2.0 * std::numbers::pi));
            },
            [&](const WeibullFading& f) {
                const double t = h / f.scale;
                return (f.shape / f.scale) * std::pow(t, f.shape - 1.0) *
                       std::exp(-std::pow(t, f.shape));
            },
            [&](const NakagamiFading& f) {
                const double log_pdf = std::log(2.0) + f.m * std::log(f.m) - std::lgamma(f.m) -
                                       f.m * std::log(f.omega) + (2.0 * f.m - 1.0) * std::log(h) -
                                       (f.m / f.omega) * h * h;
                return std::exp(log_pdf);
            },
            [&](const RiceFading& f) {
                const double s2 = f.sigma * f.sigma;
                const double log_pdf = std::log(h / s2) + detail::log_bessel_i0(h * f.nu / s2) -
                                       (h * h + f.nu * f.nu) / (2.0 * s2);
                return std::exp(log_pdf);
            },
        },
        law);
}

/// E[H^p] by adaptive quadrature of h^p * density(h) over (0, inf).
inline double numerical_moment(const FadingLaw& law, double p, double relative_tolerance = 1e-9)
{
    // Rescale so the bulk of the mass sits near t = 1.
    const double scale = std::visit(overloaded{
                                        [](const ExponentialFading& f) { return 1.0 / f.rate; },
                                        [](const LogNormalFading& f) { return std::exp(f.mu); },
                                        [](const WeibullFading& f) { return f.scale; },
                                        [](const NakagamiFading& f) { return std::sqrt(f.omega); },
                                        [](const RiceFading& f) { return f.nu + f.sigma; },
                                    },
                                    law);
    auto integrand = [&](double t) {
        const double h = scale * t;
        const double d = fading_density(law, h);
        return d == 0.0 ? 0.0 : std::pow(h, p) * d * scale;
    };
    quadrature::Tolerance tol;
    tol.relative = relative_tolerance;
    // Split at the bulk so the mapped integrand stays well resolved.
    const auto head = quadrature::integrate(integrand, 0.0, 1.0, tol);
    const auto tail = quadrature::integrate_to_infinity(integrand, 1.0, tol);
    return head.value + tail.value;
}

/**
 * E[H^(2/alpha)], the fading factor of the closed-form service probability.
 *
 * Exponential, log-normal and Weibull use their closed forms. Nakagami and
 * Rice are integrated numerically against the density.
 */
inline double fading_moment(const FadingLaw& law, double alpha)
{
    validate(law);
    d2dcache::detail::require(std::isfinite(alpha) && alpha > 2.0, "pathloss exponent must be > 2");
    const double s = 2.0 / alpha;
    return std::visit(
        overloaded{
            [&](const ExponentialFading& f) { return std::pow(f.rate, -s) * std::tgamma(s + 1.0); },
            [&](const LogNormalFading& f) {
                return std::exp(s * f.mu + 0.5 * s * s * f.sigma * f.sigma);
            },
            [&](const WeibullFading& f) {
                return std::pow(f.scale, s) * std::tgamma(s / f.shape + 1.0);
            },
            [&](const NakagamiFading&) { return numerical_moment(law, s); },
            [&](const RiceFading&) { return numerical_moment(law, s); },
        },
        law);
}

/// A value h with Pr(H > h) <= tail. Exact quantile except for Rice, where the
/// envelope bound nu + sigma * sqrt(-2 ln tail) is returned.
inline double fading_upper_quantile(const FadingLaw& law, double tail)
{
    const double log_tail = std::log(tail);
    return std::visit(
        overloaded{
            [&](const ExponentialFading& f) { return -log_tail / f.rate; },
            [&](const LogNormalFading& f) {
                const double z = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * tail);
                return std::exp(f.mu + f.sigma * z);
            },
            [&](const WeibullFading& f) { return f.scale * std::pow(-log_tail, 1.0 / f.shape); },
            [&](const NakagamiFading& f) {
                return std::sqrt(boost::math::gamma_q_inv(f.m, tail) * f.omega / f.m);
            },
            [&](const RiceFading& f) { return f.nu + f.sigma * std::sqrt(-2.0 * log_tail); },
        },
        law);
}

/// SNR(r) = P h r^-alpha / N.
inline double snr(const RadioParams& params, double h, double r)
{
    if (!(r > 0.0))
        throw DomainError("snr: distance must be > 0 (path loss is singular at r = 0)");
    return params.snr_gain() * h * std::pow(r, -params.pathloss_exponent);
}

/// Shannon rate W log2(1 + snr) in bits/s.
inline double rate(const RadioParams& params, double snr_value)
{
    return params.bandwidth * std::log2(1.0 + snr_value);
}

} // namespace d2dcache::channel
