#include "d2dcache/quadrature.hpp"
#include "d2dcache/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace d2dcache;

TEST(Quadrature, PolynomialIsExact)
{
    const auto r = quadrature::integrate([](double x) { return 3.0 * x * x; }, 0.0, 2.0);
    EXPECT_NEAR(r.value, 8.0, 1e-13);
}

TEST(Quadrature, SmoothIntegrandMatchesClosedForm)
{
    const auto r = quadrature::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    EXPECT_NEAR(r.value, 2.0, 1e-12);
}

TEST(Quadrature, EndpointSingularityConverges)
{
    // int_0^1 x^(-1/2) dx = 2
    quadrature::Tolerance tol;
    tol.relative = 1e-8;
    const auto r = quadrature::integrate([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; },
                                         0.0, 1.0, tol);
    EXPECT_NEAR(r.value, 2.0, 1e-7);
}

TEST(Quadrature, SemiInfiniteAgreesWithExpSinh)
{
    auto f = [](double x) { return std::sqrt(x) * std::exp(-x); };
    const double oracle = boost::math::quadrature::exp_sinh<double>().integrate(f);
    const auto r = quadrature::integrate_to_infinity(f, 0.0);
    EXPECT_NEAR(r.value, oracle, 1e-9 * oracle);
}

TEST(Quadrature, KinkedIntegrandAgreesWithTanhSinh)
{
    auto f = [](double x) { return std::abs(x - 0.3) * std::exp(x); };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double oracle = ts.integrate(f, 0.0, 0.3) + ts.integrate(f, 0.3, 1.0);
    EXPECT_NEAR(quadrature::integrate(f, 0.0, 1.0).value, oracle, 1e-9 * oracle);
}

TEST(Quadrature, NonConvergenceThrows)
{
    quadrature::Tolerance tol;
    tol.relative = 1e-15;
    tol.max_subdivisions = 3;
    auto f = [](double x) { return std::sin(1.0 / (x + 1e-3)); };
    EXPECT_THROW(quadrature::integrate(f, 0.0, 1.0, tol), NumericError);
}
