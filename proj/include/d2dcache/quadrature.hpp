#pragma once

#include "d2dcache/error.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

namespace d2dcache::quadrature {

struct Tolerance {
    double relative = 1e-9;
    double absolute = 0.0;
    std::size_t max_subdivisions = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t subdivisions = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for kronrod_nodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double lo, double hi)
{
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(centre);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (std::size_t k = 0; k < 7; ++k) {
        const double dx = half * kronrod_nodes[k];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += kronrod_weights[k] * pair;
        if (k % 2 == 1)
            gauss += gauss_weights[k / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

} // namespace detail

/**
 * Globally adaptive Gauss-Kronrod (7/15) integration of f over [lo, hi].
 *
 * The panel with the largest error estimate is bisected until the summed
 * estimate drops below max(absolute, relative * |I|). The integrand is never
 * evaluated at the endpoints, so integrable endpoint singularities are fine.
 * Throws NumericError when max_subdivisions is exhausted.
 */
template <class F>
Result integrate(F&& f, double lo, double hi, const Tolerance& tol = {})
{
    if (!(hi > lo))
        return {};
    std::priority_queue<detail::Panel> panels;
    panels.push(detail::gauss_kronrod_15(f, lo, hi));
    double total = panels.top().value;
    double error = panels.top().error;
    std::size_t splits = 0;
    auto converged = [&] {
        return error <= std::max(tol.absolute, tol.relative * std::abs(total));
    };
    while (!converged()) {
        if (splits >= tol.max_subdivisions)
            throw NumericError("adaptive quadrature did not converge after " +
                               std::to_string(splits) + " subdivisions (estimate " +
                               std::to_string(total) + ", error " + std::to_string(error) + ")");
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Interval collapsed to adjacent doubles; accept what we have.
            break;
        }
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.lo, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++splits;
        if (splits % 64 == 0) {
            // Re-sum to stop drift from the incremental updates.
            auto copy = panels;
            total = 0.0;
            error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }
    return {total, error, splits};
}

/// Integral over [lo, inf) via x = lo + u / (1 - u).
template <class F>
Result integrate_to_infinity(F&& f, double lo, const Tolerance& tol = {})
{
    auto mapped = [&](double u) {
        const double one_minus = 1.0 - u;
        const double x = lo + u / one_minus;
        const double fx = f(x);
        if (fx == 0.0)
            return 0.0;
        return fx / (one_minus * one_minus);
    };
    return integrate(mapped, 0.0, 1.0, tol);
}

} // namespace d2dcache::quadrature
