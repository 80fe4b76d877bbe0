#include "d2dcache/geometry.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace d2dcache;
using namespace d2dcache::geometry;

TEST(Window, RejectsNonPositiveHalfWidth)
{
    EXPECT_THROW(Window(0.0), ConfigError);
    EXPECT_THROW(Window(-1.0), ConfigError);
    EXPECT_THROW(Window(std::numeric_limits<double>::quiet_NaN()), ConfigError);
    const Window w(50e3);
    EXPECT_DOUBLE_EQ(w.area(), 1e10);
}

TEST(SamplePpp, ZeroDensityIsEmpty)
{
    RandomStream rng(3);
    const auto field = sample_ppp(0.0, Window(50e3), rng);
    EXPECT_TRUE(field.empty());
    EXPECT_FALSE(field.nearest_distance().has_value());
}

TEST(SamplePpp, RejectsInvalidDensity)
{
    RandomStream rng(3);
    EXPECT_THROW(sample_ppp(-1e-3, Window(10.0), rng), ConfigError);
    EXPECT_THROW(sample_ppp(std::numeric_limits<double>::quiet_NaN(), Window(10.0), rng), ConfigError);
}

TEST(SamplePpp, PointsInsideWindowWithConsistentDistances)
{
    RandomStream rng(11);
    const Window w(200.0);
    const auto field = sample_ppp(2.5e-3, w, rng);
    ASSERT_EQ(field.points.size(), field.distances.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        EXPECT_TRUE(w.contains(field.points[i]));
        EXPECT_GE(field.distances[i], 0.0);
        EXPECT_DOUBLE_EQ(field.distances[i], std::hypot(field.points[i].x, field.points[i].y));
    }
}

TEST(SamplePpp, CountMeanAndVarianceMatchPoisson)
{
    RandomStream rng(5);
    const Window w(100.0);
    const double mean = 2.5e-3 * w.area();
    const auto m = testing_support::sample_moments(4000, [&] {
        return static_cast<double>(sample_ppp(2.5e-3, w, rng).size());
    });
    EXPECT_NEAR(m.mean, mean, 0.05 * mean);
    EXPECT_NEAR(m.variance, mean, 0.05 * mean);
}

TEST(SamplePpp, FullWindowCountWithinThreeSigma)
{
    // 100 x 100 km at 2.5e-3 / m^2: 2.5e7 points per draw.
    RandomStream rng(8);
    const Window w(50e3);
    const double mean = 2.5e-3 * w.area();
    constexpr std::size_t draws = 200;
    double sum = 0.0;
    for (std::size_t k = 0; k < draws; ++k)
        sum += static_cast<double>(rng.poisson(2.5e-3 * w.area()));
    EXPECT_NEAR(sum / draws, mean, 3.0 * std::sqrt(mean / draws));
    const auto field = sample_ppp(2.5e-3, Window(2e3), rng);
    EXPECT_NEAR(static_cast<double>(field.size()), 4e4, 5.0 * std::sqrt(4e4));
}

TEST(SamplePpp, QuadrantsAreUniform)
{
    RandomStream rng(21);
    const Window w(100.0);
    std::vector<double> counts(4, 0.0);
    for (int k = 0; k < 500; ++k)
        for (const auto& p : sample_ppp(2.5e-3, w, rng).points)
            counts[(p.x >= 0.0 ? 1 : 0) + (p.y >= 0.0 ? 2 : 0)] += 1.0;
    EXPECT_TRUE(testing_support::chi_square_uniform_ok(counts));
}

TEST(SamplePpp, NearestDistanceMatchesPlanarLaw)
{
    RandomStream rng(9);
    const Window w(100.0);
    const auto m = testing_support::sample_moments(20000, [&] {
        return *sample_ppp(2.5e-3, w, rng).nearest_distance();
    });
    EXPECT_NEAR(mean_nearest_distance(2.5e-3), 10.0, 1e-12);
    EXPECT_NEAR(m.mean, 10.0, 3.0 * m.standard_error());
}

TEST(RadialPppStream, RadiiIncreaseAndStayInWindow)
{
    RandomStream rng(4);
    const Window w(60.0);
    RadialPppStream stream(2.5e-3, w, rng);
    double last = 0.0;
    std::size_t n = 0;
    while (auto p = stream.next(std::numeric_limits<double>::infinity())) {
        EXPECT_TRUE(w.contains(*p));
        EXPECT_GE(p->norm(), last);
        last = p->norm();
        ++n;
    }
    EXPECT_GT(n, 0u);
    EXPECT_LE(last, w.circumradius());
}

TEST(RadialPppStream, PendingPointSurvivesLimit)
{
    RandomStream a(17);
    RandomStream b(17);
    const Window w(80.0);
    RadialPppStream whole(2.5e-3, w, a);
    RadialPppStream staged(2.5e-3, w, b);
    std::vector<double> r1;
    std::vector<double> r2;
    while (auto p = whole.next(1e9))
        r1.push_back(p->norm());
    for (double limit : {5.0, 20.0, 40.0, 1e9})
        while (auto p = staged.next(limit))
            r2.push_back(p->norm());
    EXPECT_EQ(r1, r2);
}

TEST(RadialPppStream, CountAndNearestAgreeWithSamplePpp)
{
    RandomStream rng(31);
    const Window w(100.0);
    const double mean = 2.5e-3 * w.area();
    std::vector<double> nearest;
    const auto m = testing_support::sample_moments(4000, [&] {
        RadialPppStream s(2.5e-3, w, rng);
        double n = 0.0;
        while (auto p = s.next(1e9)) {
            if (n == 0.0)
                nearest.push_back(p->norm());
            n += 1.0;
        }
        return n;
    });
    EXPECT_NEAR(m.mean, mean, 0.05 * mean);
    EXPECT_NEAR(m.variance, mean, 0.05 * mean);
    const double lambda = std::numbers::pi * 2.5e-3;
    const double d = testing_support::ks_statistic(nearest, [&](double r) {
        return 1.0 - std::exp(-lambda * r * r);
    });
    EXPECT_LT(d, testing_support::ks_critical_001(nearest.size()));
}
