#pragma once

#include "d2dcache/analytics.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/content.hpp"
#include "d2dcache/geometry.hpp"
#include "d2dcache/mobility.hpp"
#include "d2dcache/placement.hpp"
#include "d2dcache/random.hpp"
#include "d2dcache/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

namespace d2dcache::simulator {

enum class FieldSampling {
    /// Points generated outward from the receiver, stopping at the radius
    /// beyond which no transmitter can deliver the file (up to prune_tail).
    radial,
    /// Whole window sampled with geometry::sample_ppp, then scanned by distance.
    full_window,
};

struct SimulationConfig {
    analytics::AnalyticInputs model;
    geometry::Window window{50e3};
    std::size_t iterations = 2000;
    std::uint64_t seed = 1;
    /// Separates the random streams of different runs sharing a seed
    /// (e.g. sweep points).
    std::uint64_t stream_key = 0;
    unsigned threads = 1;
    FieldSampling sampling = FieldSampling::radial;
    /// Keep scanning after the first qualifying transmitter (diagnostics only).
    bool full_scan = false;
    /// When set, the requested object's size is redrawn from this law every
    /// iteration instead of read from the catalogue.
    std::optional<content::SizeLaw> resample_size;
    /// Pr(B_ij | r) bound used to cut the radial scan.
    double prune_tail = 1e-15;

    void validate() const
    {
        model.validate(!resample_size.has_value());
        detail::require(iterations >= 1, "iterations must be >= 1");
        detail::require(prune_tail > 0.0 && prune_tail < 1e-3, "prune_tail must lie in (0, 1e-3)");
        if (resample_size)
            content::validate(*resample_size);
    }
};

struct ServiceOutcome {
    std::size_t iteration = 0;
    std::size_t object = 0;
    bool success = false;
    /// Qualifying transmitters seen; the scan stops at the first one unless
    /// full_scan is set.
    std::size_t qualifiers = 0;
    std::optional<double> nearest_distance;
    std::size_t scanned = 0;
};

class Simulator {
public:
    explicit Simulator(SimulationConfig config)
        : config_(std::move(config)),
          requests_((config_.validate(), config_.model.catalogue.popularity)),
          placement_(config_.model.placement)
    {
        const double half_tail = 0.5 * config_.prune_tail;
        max_fading_ = channel::fading_upper_quantile(config_.model.fading, half_tail);
        max_lifespan_ = mobility::lifespan_upper_quantile(config_.model.lifespan, half_tail);
    }

    const SimulationConfig& config() const { return config_; }

    /// Radius beyond which a transmitter delivers z bits with probability
    /// at most prune_tail.
    double prune_radius(double size_bits) const
    {
        const auto& radio = config_.model.radio;
        const double threshold = std::expm1(std::numbers::ln2 * size_bits /
                                            (radio.bandwidth * max_lifespan_));
        if (!(threshold > 0.0))
            return std::numeric_limits<double>::infinity();
        return std::pow(radio.snr_gain() * max_fading_ / threshold, 1.0 / radio.pathloss_exponent);
    }

    /// One realisation: request, transmitter field with marks, success flag.
    ServiceOutcome run_iteration(std::size_t iteration,
                                 std::optional<std::size_t> pinned_object = std::nullopt) const
    {
        auto stream = [&](StreamRole role) {
            return RandomStream::derive(config_.seed, {config_.stream_key, iteration,
                                                       static_cast<std::uint64_t>(role)});
        };
        ServiceOutcome out;
        out.iteration = iteration;
        if (pinned_object) {
            out.object = *pinned_object;
        } else {
            auto rng = stream(StreamRole::request);
            out.object = requests_(rng);
        }
        const std::size_t j = out.object;
        double size_bits = 0.0;
        if (config_.resample_size) {
            auto rng = stream(StreamRole::size);
            size_bits = content::sample_size(*config_.resample_size, rng);
        } else {
            size_bits = config_.model.catalogue.sizes[j];
        }
        // No transmitter caches an object with b_j = 0.
        if (config_.model.placement[j] <= 0.0)
            return out;

        auto geometry_rng = stream(StreamRole::geometry);
        auto placement_rng = stream(StreamRole::placement);
        auto fading_rng = stream(StreamRole::fading);
        auto lifespan_rng = stream(StreamRole::lifespan);

        // Marks are drawn for every scanned transmitter, cached or not.
        auto visit = [&](const geometry::Point& p, bool use_inventory) {
            ++out.scanned;
            const double u = placement_rng.uniform();
            const double h = channel::sample_fading(config_.model.fading, fading_rng);
            const double tau = mobility::sample_lifespan(config_.model.lifespan, lifespan_rng);
            const bool cached = use_inventory ? placement_.inventory(u).contains(j)
                                              : placement_.contains(j, u);
            if (!cached)
                return false;
            const double r = p.norm();
            const bool delivered =
                r == 0.0 ||
                tau * channel::rate(config_.model.radio, channel::snr(config_.model.radio, h, r)) >=
                    size_bits;
            if (!delivered)
                return false;
            if (out.qualifiers == 0)
                out.nearest_distance = r;
            ++out.qualifiers;
            out.success = true;
            return !config_.full_scan;
        };

        if (config_.sampling == FieldSampling::radial) {
            const double limit = prune_radius(size_bits);
            geometry::RadialPppStream points(config_.model.density, config_.window, geometry_rng);
            while (auto p = points.next(limit))
                if (visit(*p, false))
                    break;
        } else {
            const auto field =
                geometry::sample_ppp(config_.model.density, config_.window, geometry_rng);
            std::vector<std::size_t> order(field.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return field.distances[a] < field.distances[b];
            });
            for (std::size_t i : order)
                if (visit(field.points[i], true))
                    break;
        }
        return out;
    }

    /// All iterations; the result is independent of the thread count.
    std::vector<ServiceOutcome> run(std::optional<std::size_t> pinned_object = std::nullopt) const
    {
        std::vector<ServiceOutcome> outcomes(config_.iterations);
        const std::size_t n = outcomes.size();
        const std::size_t width =
            std::max<std::size_t>(1, std::min<std::size_t>(config_.threads, n));
        if (width == 1) {
            for (std::size_t i = 0; i < n; ++i)
                outcomes[i] = run_iteration(i, pinned_object);
            return outcomes;
        }
        std::vector<std::exception_ptr> errors(width);
        {
            std::vector<std::jthread> workers;
            workers.reserve(width);
            for (std::size_t w = 0; w < width; ++w) {
                workers.emplace_back([&, w] {
                    try {
                        for (std::size_t i = w; i < n; i += width)
                            outcomes[i] = run_iteration(i, pinned_object);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
        return outcomes;
    }

private:
    SimulationConfig config_;
    content::RequestSampler requests_;
    placement::PbpSampler placement_;
    double max_fading_ = 0.0;
    double max_lifespan_ = 0.0;
};

/// Success frequency with binomial standard error sqrt(p (1 - p) / n).
inline analytics::MetricEstimate summarize(const std::vector<ServiceOutcome>& outcomes)
{
    std::size_t hits = 0;
    for (const auto& o : outcomes)
        hits += o.success ? 1 : 0;
    const double n = static_cast<double>(outcomes.size());
    const double p = n > 0 ? static_cast<double>(hits) / n : 0.0;
    return {p, n > 0 ? std::sqrt(p * (1.0 - p) / n) : 0.0, outcomes.size()};
}

inline ServiceOutcome run_iteration(const SimulationConfig& config, std::size_t iteration)
{
    return Simulator(config).run_iteration(iteration);
}

inline analytics::MetricEstimate estimate_total_success(const SimulationConfig& config)
{
    return summarize(Simulator(config).run());
}

inline analytics::MetricEstimate estimate_per_object_success(const SimulationConfig& config,
                                                             std::size_t object)
{
    detail::require(object < config.model.placement.size(), "object index out of range");
    return summarize(Simulator(config).run(object));
}

/// Binomial standard error of a frequency whose true value is p.
inline double binomial_standard_error(double p, std::size_t n)
{
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

/// CSV: iteration,object,success,n_qualifiers,nearest_m (object 1-based,
/// nearest_m empty when nothing qualified).
inline void write_outcomes_csv(std::ostream& out, const std::vector<ServiceOutcome>& outcomes)
{
    out << "iteration,object,success,n_qualifiers,nearest_m\n";
    for (const auto& o : outcomes) {
        out << o.iteration << ',' << (o.object + 1) << ',' << (o.success ? 1 : 0) << ','
            << o.qualifiers << ',';
        if (o.nearest_distance)
            out << format_number(*o.nearest_distance);
        out << '\n';
    }
}

} // namespace d2dcache::simulator
