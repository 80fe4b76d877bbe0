#include "d2dcache/content.hpp"
#include "support.hpp"

#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/pareto.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace d2dcache;
using namespace d2dcache::content;

TEST(Zipf, UniformPopularity)
{
    const auto a = zipf_popularity(2, 0.0);
    EXPECT_DOUBLE_EQ(a[0], 0.5);
    EXPECT_DOUBLE_EQ(a[1], 0.5);
}

TEST(Zipf, HarmonicThree)
{
    const auto a = zipf_popularity(3, 1.0);
    EXPECT_NEAR(a[0], 6.0 / 11.0, 1e-15);
    EXPECT_NEAR(a[1], 3.0 / 11.0, 1e-15);
    EXPECT_NEAR(a[2], 2.0 / 11.0, 1e-15);
}

TEST(Zipf, HeadMassOfTenObjects)
{
    // Frozen values of sum_{j<=10} j^-0.78 / sum_{j<=F} j^-0.78.
    EXPECT_NEAR(zipf_popularity(100, 0.78).head_mass(10), 0.42592, 5e-6);
    EXPECT_NEAR(zipf_popularity(200, 0.78).head_mass(10), 0.343325, 5e-6);
}

TEST(Zipf, NormalisedAndNonincreasing)
{
    for (std::size_t f : {2u, 10u, 1000u, 1000000u}) {
        for (double g : {0.0, 0.5, 0.78, 1.0, 2.0, 3.0}) {
            const auto a = zipf_popularity(f, g);
            EXPECT_NEAR(testing_support::accurate_sum(a.probabilities), 1.0, 1e-12) << f << ' ' << g;
            EXPECT_TRUE(std::is_sorted(a.probabilities.rbegin(), a.probabilities.rend()));
        }
    }
}

TEST(Zipf, RejectsBadArguments)
{
    EXPECT_THROW(zipf_popularity(1, 0.5), ConfigError);
    EXPECT_THROW(zipf_popularity(10, -0.1), ConfigError);
}

TEST(RequestSampler, FrequenciesMatchPopularity)
{
    const auto a = zipf_popularity(20, 0.78);
    const RequestSampler sampler(a);
    RandomStream rng(3);
    constexpr std::size_t n = 200000;
    std::vector<std::size_t> counts(a.size(), 0);
    for (std::size_t k = 0; k < n; ++k)
        ++counts[sampler(rng)];
    for (std::size_t j = 0; j < a.size(); ++j)
        EXPECT_NEAR(static_cast<double>(counts[j]) / n, a[j], 3.5 * testing_support::binomial_se(a[j], n));
}

TEST(SizeLaw, UniformVideoRange)
{
    RandomStream rng(4);
    const UniformSize law{5e7, 2e9};
    const auto m = testing_support::sample_moments(1'000'000, [&] {
        const double z = sample_size(law, rng);
        EXPECT_TRUE(z >= 5e7 && z <= 2e9);
        return z;
    });
    EXPECT_NEAR(m.mean, 1.025e9, 3.0 * m.standard_error());
}

TEST(SizeLaw, ParetoMinimumAndMedian)
{
    RandomStream rng(5);
    const ParetoSize law{20.0 / 19.0, 5e7};
    std::vector<double> xs = sample_sizes(law, 1'000'000, rng);
    EXPECT_GE(*std::min_element(xs.begin(), xs.end()), 5e7);
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    const double median = xs[xs.size() / 2];
    const double oracle = boost::math::median(boost::math::pareto(5e7, 20.0 / 19.0));
    // Median standard error: 1 / (2 f(m) sqrt(n)).
    const double density = boost::math::pdf(boost::math::pareto(5e7, 20.0 / 19.0), oracle);
    EXPECT_NEAR(median, oracle, 3.0 / (2.0 * density * std::sqrt(1e6)));
}

TEST(SizeLaw, FiniteMeanLawsMatchSampleMeans)
{
    const std::vector<SizeLaw> laws = {UniformSize{5e7, 2e9}, ExponentialSize{1e-9},
                                       ParetoSize{3.5, 5e7}, WeibullSize{1e9, 1.5},
                                       LogNormalSize{std::log(1e9), 0.5, {}, {}}};
    for (const auto& law : laws) {
        RandomStream rng(7);
        const auto m = testing_support::sample_moments(1'000'000, [&] { return sample_size(law, rng); });
        EXPECT_NEAR(m.mean, mean_size(law), 3.0 * m.standard_error()) << name(law);
    }
}

TEST(SizeLaw, HeavyTailedLawsMatchCdf)
{
    RandomStream rng(8);
    std::vector<double> logn = sample_sizes(LogNormalSize{5.0 * std::numbers::ln10,
                                                          std::sqrt(8.0 * std::numbers::ln10), {}, {}},
                                            50000, rng);
    const boost::math::lognormal ln(5.0 * std::numbers::ln10, std::sqrt(8.0 * std::numbers::ln10));
    EXPECT_LT(testing_support::ks_statistic(logn, [&](double z) { return boost::math::cdf(ln, z); }),
              testing_support::ks_critical_001(logn.size()));
    std::vector<double> weib = sample_sizes(WeibullSize{276.0, 0.1}, 50000, rng);
    EXPECT_LT(testing_support::ks_statistic(
                  weib, [](double z) { return -std::expm1(-std::pow(z / 276.0, 0.1)); }),
              testing_support::ks_critical_001(weib.size()));
}

TEST(SizeLaw, WeibullShapeOneIsExponential)
{
    RandomStream a(9);
    RandomStream b(10);
    const auto w = sample_sizes(WeibullSize{2e8, 1.0}, 20000, a);
    const auto e = sample_sizes(ExponentialSize{1.0 / 2e8}, 20000, b);
    EXPECT_LT(testing_support::ks_two_sample(w, e),
              testing_support::ks_two_sample_critical_001(w.size(), e.size()));
}

TEST(SizeLaw, TruncatedLogNormalStaysInRange)
{
    RandomStream rng(11);
    const LogNormalSize law{std::log(1e8), 2.0, 1e7, 1e9};
    for (double z : sample_sizes(law, 20000, rng)) {
        EXPECT_GE(z, 1e7);
        EXPECT_LE(z, 1e9);
    }
    EXPECT_THROW(mean_size(law), ConfigError);
    EXPECT_THROW(validate(SizeLaw{LogNormalSize{0.0, 1.0, 5.0, 2.0}}), ConfigError);
}

TEST(MeanSize, VideoParameterisations)
{
    EXPECT_NEAR(mean_size(ExponentialSize{1e-9}), 1e9, 1e-3);
    EXPECT_NEAR(mean_size(ParetoSize{20.0 / 19.0, 5e7}), 1e9, 1e-3);
    const double ln10 = std::numbers::ln10;
    EXPECT_NEAR(mean_size(LogNormalSize{5.0 * ln10, std::sqrt(8.0 * ln10), {}, {}}), 1e9, 1e-3);
    EXPECT_NEAR(mean_size(WeibullSize{276.0, 0.1}), 276.0 * 3628800.0, 1e-3);
    EXPECT_NEAR(mean_size(UniformSize{5e7, 2e9}), 1.025e9, 1e-3);
}

TEST(MeanSize, ParetoWithoutFiniteMeanThrows)
{
    EXPECT_THROW(mean_size(ParetoSize{1.0, 5e7}), ConfigError);
    EXPECT_THROW(mean_size(ParetoSize{0.5, 5e7}), ConfigError);
}

TEST(SizeLaw, SamplesStrictlyPositive)
{
    RandomStream rng(12);
    for (const SizeLaw& law : {SizeLaw{ExponentialSize{1e-9}}, SizeLaw{WeibullSize{276.0, 0.1}},
                               SizeLaw{ParetoSize{20.0 / 19.0, 5e7}}})
        for (double z : sample_sizes(law, 100000, rng))
            ASSERT_GT(z, 0.0) << name(law);
}

TEST(Ordering, Examples)
{
    const auto base = make_catalogue(zipf_popularity(3, 1.0), {3.0, 1.0, 2.0});
    EXPECT_EQ(apply_ordering(base, SizeOrdering::increasing).sizes, (std::vector<double>{1.0, 2.0, 3.0}));
    EXPECT_EQ(apply_ordering(base, SizeOrdering::decreasing).sizes, (std::vector<double>{3.0, 2.0, 1.0}));
    EXPECT_EQ(apply_ordering(base, SizeOrdering::independent).sizes, (std::vector<double>{3.0, 1.0, 2.0}));
    EXPECT_EQ(apply_ordering(base, SizeOrdering::increasing).popularity.probabilities,
              base.popularity.probabilities);
}

TEST(Ordering, PreservesMultiset)
{
    RandomStream rng(13);
    const auto base = make_catalogue(zipf_popularity(500, 0.78),
                                     sample_sizes(ParetoSize{20.0 / 19.0, 5e7}, 500, rng));
    auto reference = base.sizes;
    std::sort(reference.begin(), reference.end());
    for (auto mode : {SizeOrdering::increasing, SizeOrdering::decreasing, SizeOrdering::independent}) {
        auto sizes = apply_ordering(base, mode).sizes;
        std::sort(sizes.begin(), sizes.end());
        EXPECT_EQ(sizes, reference);
    }
}

TEST(Catalogue, TopSizesAndCsv)
{
    const std::vector<double> sizes = {4.0, 9.0, 1.0, 7.0};
    EXPECT_EQ(top_sizes(sizes, 2), (std::vector<double>{9.0, 7.0}));
    EXPECT_EQ(top_sizes(sizes, 10).size(), 4u);
    std::ostringstream out;
    write_catalogue_csv(out, make_catalogue(zipf_popularity(2, 0.0), {5.0, 6.0}));
    EXPECT_EQ(out.str(), "index,popularity,size_bits\n1,0.5,5\n2,0.5,6\n");
}

TEST(Catalogue, RejectsMismatchedLengths)
{
    EXPECT_THROW(make_catalogue(zipf_popularity(3, 1.0), {1.0, 2.0}), ConfigError);
    EXPECT_THROW(make_catalogue(zipf_popularity(2, 1.0), {1.0, 0.0}), ConfigError);
}
