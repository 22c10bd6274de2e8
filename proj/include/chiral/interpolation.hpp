#pragma once

#include <algorithm>
#include <cstddef>
#include <span>

namespace chiral {

/// Locates the interval [x_k, x_{k+1}] containing x on an ascending grid
/// (clamped to the end intervals).
inline std::size_t locate_interval(std::span<const double> grid, double x) {
    if (grid.size() < 2) return 0;
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t k = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
    return std::min(k, grid.size() - 2);
}

struct HermiteWeights {
    double h00, h10, h01, h11;
    double d00, d10, d01, d11;  // d/dx of the basis functions
};

/// Cubic Hermite basis at x in [x0, x1].
inline HermiteWeights hermite_weights(double x0, double x1, double x) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return {2 * s3 - 3 * s2 + 1, (s3 - 2 * s2 + s) * h, -2 * s3 + 3 * s2, (s3 - s2) * h,
            (6 * s2 - 6 * s) / h,  3 * s2 - 4 * s + 1,    (-6 * s2 + 6 * s) / h, 3 * s2 - 2 * s};
}

/// Integral of the cubic Hermite interpolant over [x0, x].
inline double hermite_integral(double x0, double x1, double y0, double dy0, double y1, double dy1, double x) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    const double i00 = s4 / 2 - s3 + s;
    const double i10 = (s4 / 4 - 2 * s3 / 3 + s2 / 2) * h;
    const double i01 = -s4 / 2 + s3;
    const double i11 = (s4 / 4 - s3 / 3) * h;
    return h * (i00 * y0 + i10 * dy0 + i01 * y1 + i11 * dy1);
}

}  // namespace chiral
