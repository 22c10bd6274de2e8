#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for scalar, complex or
// fixed-size Eigen vector integrands. Subintervals are bisected in order of
// decreasing error estimate until the summed estimate meets the tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <sstream>
#include <vector>

#include <Eigen/Core>

#include "chiral/errors.hpp"

namespace chiral::quad {

struct Options {
    double abs_tol = 1e-15;
    double rel_tol = 1e-10;
    /// Node budget expressed as the maximum number of subintervals.
    std::size_t max_intervals = 20000;
};

template <class R>
struct Result {
    R value;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
};

inline double norm(double v) { return std::abs(v); }
inline double norm(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double norm(const Eigen::MatrixBase<Derived>& v) {
    return v.cwiseAbs().maxCoeff();
}

namespace detail {

// Kronrod abscissae (positive half, descending) and weights; Gauss weights for
// the odd-indexed abscissae. Values from QUADPACK qk15.
inline constexpr std::array<double, 8> xgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class R>
struct Segment {
    double a;
    double b;
    R value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class R>
R zero_like(const R& v) {
    if constexpr (std::is_arithmetic_v<R>) {
        return R{0};
    } else if constexpr (std::is_same_v<R, std::complex<double>>) {
        return R{0.0, 0.0};
    } else {
        return R::Zero(v.rows(), v.cols());
    }
}

template <class F>
auto gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    using R = std::decay_t<decltype(f(c))>;
    const R fc = f(c);
    R kronrod = fc * wgk[7];
    R gauss = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const R s = f(c - dx) + f(c + dx);
        kronrod = kronrod + s * wgk[j];
        if (j % 2 == 1) gauss = gauss + s * wg[j / 2];
    }
    R value = kronrod * h;
    const double err = norm((kronrod - gauss) * h);
    return Segment<R>{a, b, std::move(value), err};
}

}  // namespace detail

/// Integrates f over [a, b]. `breakpoints` inside (a, b) seed the initial
/// partition (resonances, kinks). Throws QuadratureFailure when the tolerance
/// is not met within the node budget.
template <class F>
auto integrate(const F& f, double a, double b, const Options& opt = {},
               std::vector<double> breakpoints = {}) {
    using R = std::decay_t<decltype(f(a))>;
    std::vector<double> edges{a};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double x : breakpoints)
        if (x > a && x < b && x > edges.back()) edges.push_back(x);
    edges.push_back(b);

    std::priority_queue<detail::Segment<R>> heap;
    Result<R> res;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto seg = detail::gk15(f, edges[i], edges[i + 1]);
        res.value = i == 0 ? seg.value : R(res.value + seg.value);
        res.error += seg.error;
        heap.push(std::move(seg));
    }
    res.evaluations = 15 * heap.size();

    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * norm(res.value)); };
    while (res.error > target()) {
        if (heap.size() >= opt.max_intervals) {
            std::ostringstream msg;
            msg << "adaptive quadrature on [" << a << ", " << b << "] exhausted " << opt.max_intervals
                << " subintervals; error estimate " << res.error << " > " << target();
            throw QuadratureFailure(msg.str());
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureFailure("adaptive quadrature: subinterval below machine resolution");
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        res.value = res.value + (left.value + right.value - worst.value);
        res.error += left.error + right.error - worst.error;
        res.evaluations += 30;
        heap.push(std::move(left));
        heap.push(std::move(right));
    }

    // Re-sum from the final partition so the reported value carries no
    // accumulated update round-off, and recompute the error with it.
    R total = detail::zero_like(res.value);
    double err = 0.0;
    res.intervals = heap.size();
    std::vector<detail::Segment<R>> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
    for (const auto& s : segs) {
        total = total + s.value;
        err += s.error;
    }
    res.value = total;
    res.error = err;
    return res;
}

/// Integrates f over [a, inf) through x = a + scale * s / (1 - s), s in [0, 1).
template <class F>
auto integrate_to_infinity(const F& f, double a, double scale, const Options& opt = {}) {
    using R = std::decay_t<decltype(f(a))>;
    auto g = [&](double s) -> R {
        const double one_minus = 1.0 - s;
        const double x = a + scale * s / one_minus;
        const double jac = scale / (one_minus * one_minus);
        return f(x) * jac;
    };
    return integrate(g, 0.0, 1.0, opt);
}

}  // namespace chiral::quad
