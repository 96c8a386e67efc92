#pragma once

// Differentiation, interpolation and cumulative quadrature of samples on
// increasing, possibly nonuniform grids.  All three use local Lagrange
// polynomials: 5-point stencils for derivatives, 4-point (cubic) for
// interpolation and integration, i.e. fourth-order accurate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ricci/error.hpp"

namespace ricci::grid {

namespace detail {

/// First index of a `width`-point stencil around position i, kept in range.
inline std::size_t stencil_start(std::size_t i, std::size_t size, std::size_t width) {
    const std::size_t half = width / 2;
    std::size_t start = i >= half ? i - half : 0;
    if (start + width > size) start = size - width;
    return start;
}

/// Value at x of the Lagrange interpolant through (xs[k], ys[k]).
inline double lagrange_value(std::span<const double> xs, std::span<const double> ys, double x) {
    double sum = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        double l = 1.0;
        for (std::size_t m = 0; m < xs.size(); ++m)
            if (m != j) l *= (x - xs[m]) / (xs[j] - xs[m]);
        sum += l * ys[j];
    }
    return sum;
}

/// Derivative at x of the Lagrange interpolant.
inline double lagrange_derivative(std::span<const double> xs, std::span<const double> ys, double x) {
    double sum = 0.0;
    const std::size_t w = xs.size();
    for (std::size_t j = 0; j < w; ++j) {
        double dl = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            if (k == j) continue;
            double term = 1.0 / (xs[j] - xs[k]);
            for (std::size_t m = 0; m < w; ++m)
                if (m != j && m != k) term *= (x - xs[m]) / (xs[j] - xs[m]);
            dl += term;
        }
        sum += dl * ys[j];
    }
    return sum;
}

inline void check(std::span<const double> xs, std::span<const double> ys, std::size_t min_size) {
    if (xs.size() != ys.size()) throw PreconditionError("grid: abscissa/ordinate size mismatch");
    if (xs.size() < min_size) throw PreconditionError("grid: too few samples");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw PreconditionError("grid: abscissae must be strictly increasing");
}

} // namespace detail

/// dy/dx at every sample from 5-point stencils (centered on the interior,
/// shifted toward the ends).
inline std::vector<double> derivative(std::span<const double> xs, std::span<const double> ys) {
    detail::check(xs, ys, 5);
    std::vector<double> d(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::size_t s = detail::stencil_start(i, xs.size(), 5);
        d[i] = detail::lagrange_derivative(xs.subspan(s, 5), ys.subspan(s, 5), xs[i]);
    }
    return d;
}

/// Cubic interpolation at x inside [xs.front(), xs.back()].
inline double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
    detail::check(xs, ys, 4);
    if (x < xs.front() || x > xs.back()) throw PreconditionError("grid: interpolation point outside range");
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    i = i == 0 ? 0 : i - 1;
    const std::size_t start = std::min(i > 0 ? i - 1 : 0, xs.size() - 4);
    return detail::lagrange_value(xs.subspan(start, 4), ys.subspan(start, 4), x);
}

/// Running integral I[i] = int_{xs[0]}^{xs[i]} y dx, I[0] = 0.  Each panel
/// integrates the cubic through the four surrounding samples with two-point
/// Gauss-Legendre, which is exact for cubics.
inline std::vector<double> cumulative_integral(std::span<const double> xs, std::span<const double> ys) {
    detail::check(xs, ys, 4);
    static const double g = 1.0 / std::sqrt(3.0);
    std::vector<double> out(xs.size(), 0.0);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const std::size_t start = std::min(i > 0 ? i - 1 : 0, xs.size() - 4);
        const auto sx = xs.subspan(start, 4);
        const auto sy = ys.subspan(start, 4);
        const double mid = 0.5 * (xs[i] + xs[i + 1]);
        const double half = 0.5 * (xs[i + 1] - xs[i]);
        const double panel = half * (detail::lagrange_value(sx, sy, mid - g * half) +
                                     detail::lagrange_value(sx, sy, mid + g * half));
        out[i + 1] = out[i] + panel;
    }
    return out;
}

} // namespace ricci::grid
