#pragma once

#include "d2dcache/error.hpp"
#include "d2dcache/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace d2dcache::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
};

/// Axis-aligned square [-half_width, half_width]^2 around the typical receiver.
class Window {
public:
    explicit Window(double half_width) : half_width_(half_width)
    {
        detail::require(std::isfinite(half_width) && half_width > 0.0,
                        "window half_width must be finite and > 0");
    }

    double half_width() const { return half_width_; }
    double area() const { return 4.0 * half_width_ * half_width_; }
    /// Radius of the smallest disc around the origin containing the window.
    double circumradius() const { return half_width_ * std::numbers::sqrt2; }

    bool contains(const Point& p) const
    {
        return std::abs(p.x) <= half_width_ && std::abs(p.y) <= half_width_;
    }

private:
    double half_width_;
};

/// Transmitter locations; distances are |x_i| to the receiver at the origin.
struct PointField {
    double density = 0.0;
    std::vector<Point> points;
    std::vector<double> distances;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    std::optional<double> nearest_distance() const
    {
        if (distances.empty())
            return std::nullopt;
        double best = std::numeric_limits<double>::infinity();
        for (double d : distances)
            best = std::min(best, d);
        return best;
    }
};

inline void validate_density(double density)
{
    detail::require(std::isfinite(density) && density >= 0.0,
                    "PPP density must be finite and >= 0");
}

/// Homogeneous PPP in the window: Poisson(density * area) count, uniform positions.
inline PointField sample_ppp(double density, const Window& window, RandomStream& rng)
{
    validate_density(density);
    PointField field;
    field.density = density;
    const std::uint64_t count = rng.poisson(density * window.area());
    field.points.reserve(count);
    field.distances.reserve(count);
    const double w = window.half_width();
    for (std::uint64_t i = 0; i < count; ++i) {
        Point p{rng.uniform(-w, w), rng.uniform(-w, w)};
        field.distances.push_back(p.norm());
        field.points.push_back(p);
    }
    return field;
}

/**
 * Lazily generates the points of a homogeneous PPP in increasing distance
 * from the origin. The squared radii are the arrival times of a Poisson
 * process of rate pi * density, so the k-th point satisfies
 * pi * density * r_k^2 = E_1 + ... + E_k with E_i ~ Exp(1).
 *
 * Points outside the window are skipped, which makes the output a PPP
 * restricted to the window.
 */
class RadialPppStream {
public:
    RadialPppStream(double density, const Window& window, RandomStream& rng)
        : rate_(std::numbers::pi * density), window_(window), rng_(rng)
    {
        validate_density(density);
    }

    /// Next point with |x| <= max_radius, or nullopt once the stream passes it.
    /// A point beyond max_radius is kept and returned by a later call with a
    /// larger limit.
    std::optional<Point> next(double max_radius)
    {
        if (rate_ == 0.0)
            return std::nullopt;
        for (;;) {
            if (!pending_) {
                arrival_ += rng_.exponential();
                radius_ = std::sqrt(arrival_ / rate_);
                const double angle = 2.0 * std::numbers::pi * rng_.uniform();
                pending_ = Point{radius_ * std::cos(angle), radius_ * std::sin(angle)};
            }
            if (radius_ > max_radius || radius_ > window_.circumradius())
                return std::nullopt;
            const Point p = *pending_;
            pending_.reset();
            if (window_.contains(p))
                return p;
        }
    }

    double last_radius() const { return radius_; }

private:
    double rate_;
    Window window_;
    RandomStream& rng_;
    double arrival_ = 0.0;
    double radius_ = 0.0;
    std::optional<Point> pending_;
};

/// Mean distance from the origin to the nearest point of a planar PPP.
inline double mean_nearest_distance(double density)
{
    return 0.5 / std::sqrt(density);
}

} // namespace d2dcache::geometry
