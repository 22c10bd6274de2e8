#pragma once

// Memory kernels of the second-order time-convolutionless generator.
//
// For the three dressed transition frequencies omega_l = omega + l omega_s,
// l in {0, +1, -1}, and the continuum bath J(w):
//
//   Gamma_l(t)  = int dw J(w) nbar(w)     (exp(i(w - omega_l)t) - 1) / (i(w - omega_l))
//   Gamma'_l(t) = int dw J(w) (nbar(w)+1) (exp(i(w - omega_l)t) - 1) / (i(w - omega_l))
//
// The time integral is done in closed form; the frequency integral by adaptive
// quadrature. Gamma'_l is split into a vacuum part (weight 1) and the thermal
// part Gamma_l (weight nbar). Time derivatives (the bath correlation functions)
// are integrated on the same nodes so the tables can be Hermite-interpolated.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <span>
#include <sstream>
#include <vector>

#include "chiral/effective.hpp"
#include "chiral/errors.hpp"
#include "chiral/interpolation.hpp"
#include "chiral/linalg.hpp"
#include "chiral/parallel.hpp"
#include "chiral/quadrature.hpp"
#include "chiral/spectral_density.hpp"

namespace chiral {

/// Channel slots in every per-l array: 0 -> l = 0, 1 -> l = +, 2 -> l = -.
inline constexpr std::array<int, 3> channel_sign{0, +1, -1};

struct QuadratureConfig {
    /// Integration window half-width in units of the spectral width.
    double window_k = 50.0;
    quad::Options options{1e-15, 1e-11, 20000};
};

struct BathConfig {
    SpectralDensity spectral = Lorentzian{};
    /// Energy units, k_B = 1.
    double temperature = 0.0;
    QuadratureConfig quadrature{};
    unsigned threads = 0;
};

/// Weights of the Lindblad channels. Each rate combines an absorption kernel
/// (Gamma) and an emission kernel (Gamma'):
///   gamma_z = w_z (Re Gamma_0 + Re Gamma'_0)
///   gamma_+ = w_plus Re Gamma_+ + w_minus Re Gamma'_-
///   gamma_- = w_minus Re Gamma_- + w_plus Re Gamma'_+
struct RateWeights {
    double w_z = 0.0;
    double w_plus = 0.0;
    double w_minus = 0.0;

    /// 2 c^2 for each dressed operator coefficient.
    static RateWeights from(const InteractionCoefficients& c) {
        return {2.0 * c.c_z * c.c_z, 2.0 * c.c_plus * c.c_plus, 2.0 * c.c_minus * c.c_minus};
    }
};

struct KernelSnapshot {
    std::array<cplx, 3> gamma{};
    std::array<cplx, 3> gamma_prime{};
    double rate_z = 0.0;
    double rate_plus = 0.0;
    double rate_minus = 0.0;
};

struct KernelTable {
    std::vector<double> times;
    std::array<std::vector<cplx>, 3> gamma;
    std::array<std::vector<cplx>, 3> gamma_prime;
    /// d/dt of the kernels (bath correlation functions).
    std::array<std::vector<cplx>, 3> dgamma;
    std::array<std::vector<cplx>, 3> dgamma_prime;

    std::vector<double> rate_z, rate_plus, rate_minus;
    std::vector<double> drate_z, drate_plus, drate_minus;
    bool has_rates = false;

    double temperature = 0.0;
    /// Largest quadrature error estimate over all integrals.
    double max_error = 0.0;
    std::size_t evaluations = 0;

    std::size_t size() const { return times.size(); }
    double t_max() const { return times.empty() ? 0.0 : times.back(); }

    /// Cubic Hermite interpolation (exact nodal derivatives) at time t.
    KernelSnapshot at(double t) const {
        KernelSnapshot s;
        if (times.size() == 1) {
            for (int l = 0; l < 3; ++l) {
                s.gamma[l] = gamma[l][0];
                s.gamma_prime[l] = gamma_prime[l][0];
            }
            if (has_rates) s.rate_z = rate_z[0], s.rate_plus = rate_plus[0], s.rate_minus = rate_minus[0];
            return s;
        }
        const std::size_t k = locate_interval(times, t);
        const auto w = hermite_weights(times[k], times[k + 1], t);
        auto interp = [&](const auto& y, const auto& dy) {
            return w.h00 * y[k] + w.h10 * dy[k] + w.h01 * y[k + 1] + w.h11 * dy[k + 1];
        };
        for (int l = 0; l < 3; ++l) {
            s.gamma[l] = interp(gamma[l], dgamma[l]);
            s.gamma_prime[l] = interp(gamma_prime[l], dgamma_prime[l]);
        }
        if (has_rates) {
            s.rate_z = interp(rate_z, drate_z);
            s.rate_plus = interp(rate_plus, drate_plus);
            s.rate_minus = interp(rate_minus, drate_minus);
        }
        return s;
    }
};

namespace detail {

/// (exp(ixt) - 1)/(ix), with the removable point x -> 0 expanded.
inline cplx kernel_factor(double x, double t) {
    const double y = x * t;
    if (std::abs(y) < 1e-6) return {t * (1.0 - y * y / 6.0), 0.5 * t * y};
    const double s = std::sin(0.5 * y);
    return {std::sin(y) / x, 2.0 * s * s / x};
}

using KernelPair = Eigen::Matrix<cplx, 2, 1>;

struct PartResult {
    cplx value{};
    cplx rate{};
    double error = 0.0;
    std::size_t evaluations = 0;
};

/// Frequency layout of one spectral family. The integration variable is
/// y = w - anchor so offsets near a sharp line keep their digits.
struct Layout {
    double anchor = 0.0;
    double width = 1.0;
    /// Line centre in y.
    double center_y = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    bool lower_tail = false;
    /// Tails are evaluated on a rotated contour; needs J analytic and
    /// algebraically decaying to the right of the window.
    bool rotate_tails = true;
};

/// Integrates one part (vacuum or thermal) of one channel at one time.
///
/// The window around the spectral weight and every channel frequency is done
/// on the real axis. Semi-infinite tails split K = exp(ixt)/(ix) + i/x: the
/// non-oscillating piece stays on the real axis, the oscillating piece moves to
/// the vertical line Re w = const where exp(ixt) decays.
class KernelIntegrator {
public:
    KernelIntegrator(const BathConfig& bath, const ChiralQubitParams& params)
        : bath_(bath), params_(params) {
        validate(bath.spectral);
        if (!(bath.temperature >= 0.0) || !std::isfinite(bath.temperature))
            throw ConfigError("temperature must be finite and >= 0");
        if (!(bath.quadrature.window_k > 0.0)) throw ConfigError("window multiplier must be positive");
    }

    bool thermal_active() const { return bath_.temperature > 0.0; }

    PartResult vacuum(int slot, double t) const { return integrate_part(slot, t, false); }
    PartResult thermal(int slot, double t) const { return integrate_part(slot, t, true); }

    /// omega_l for a channel slot.
    double channel_frequency(int slot) const { return params_.omega + channel_sign[slot] * params_.omega_s; }

private:
    PartResult integrate_part(int slot, double t, bool thermal) const {
        return std::visit([&](const auto& s) { return integrate(s, slot, t, thermal); }, bath_.spectral);
    }

    /// anchor - omega_l
    double channel_offset(const Lorentzian& s, int slot) const {
        return (s.omega0 - params_.omega) - channel_sign[slot] * params_.omega_s;
    }
    template <class Density>
    double channel_offset(const Density&, int slot) const { return -channel_frequency(slot); }

    /// Smallest and largest anchor - omega_l over the three channels.
    template <class Density>
    std::pair<double, double> offset_range(const Density& s) const {
        double lo = channel_offset(s, 0), hi = lo;
        for (int l = 1; l < 3; ++l) {
            lo = std::min(lo, channel_offset(s, l));
            hi = std::max(hi, channel_offset(s, l));
        }
        return {lo, hi};
    }

    Layout layout(const Lorentzian& s, bool thermal) const {
        const double k = bath_.quadrature.window_k;
        const auto [olo, ohi] = offset_range(s);
        Layout g;
        g.anchor = s.omega0;
        g.width = s.lambda;
        // x = offset + y vanishes at y = -offset.
        g.y_hi = std::max(k * s.lambda, -olo + k * s.lambda);
        if (thermal) {
            if (!(s.omega0 - k * s.lambda > 0.0)) {
                std::ostringstream msg;
                msg << "thermal Lorentzian kernel diverges: window [omega0 - K lambda, omega0 + K lambda] reaches"
                    << " zero frequency (omega0 = " << s.omega0 << ", K lambda = " << k * s.lambda << ")";
                throw QuadratureFailure(msg.str());
            }
            // Reach the channel frequencies too, but stay clear of the Bose
            // divergence at w = 0.
            const double floor = -0.5 * (s.omega0 + k * s.lambda);
            g.y_lo = std::max(std::min(-k * s.lambda, -ohi - k * s.lambda), floor);
        } else {
            g.y_lo = std::min(-k * s.lambda, -ohi - k * s.lambda);
            g.lower_tail = true;
        }
        return g;
    }

    Layout layout(const Ohmic& s, bool) const {
        Layout g;
        g.width = s.omega_c;
        g.center_y = s.omega_c;
        g.y_hi = std::max((1.0 + bath_.quadrature.window_k) * s.omega_c,
                          -offset_range(s).first + bath_.quadrature.window_k * s.omega_c);
        // exp(-w/omega_c) grows along vertical lines relative to the 1/w^2
        // needed for rotation, but the real-axis tail is already exponentially small.
        g.rotate_tails = false;
        return g;
    }

    Layout layout(const CavityEffective& s, bool) const {
        const auto support = spectral_support(s);
        const double k = bath_.quadrature.window_k;
        Layout g;
        g.width = support.width;
        g.center_y = support.center;
        g.y_hi = std::max(support.center + k * support.width, -offset_range(s).first + k * support.width);
        return g;
    }

    template <class Density>
    PartResult integrate(const Density& s, int slot, double t, bool thermal) const {
        const Layout g = layout(s, thermal);
        const double offset = channel_offset(s, slot);
        const double temperature = bath_.temperature;
        const double rate_scale = 1.0 / (std::abs(offset + g.center_y) + g.width);
        const cplx i1{0.0, 1.0};

        auto weight = [&](double y) {
            const double w = g.anchor + y;
            double wgt = spectral_eval(s, w);
            if (thermal && wgt != 0.0) wgt *= mean_occupation(w, temperature);
            return wgt;
        };
        auto real_axis = [&](double y) -> KernelPair {
            const double wgt = weight(y);
            const double x = offset + y;
            KernelPair out;
            out(0) = wgt * kernel_factor(x, t);
            out(1) = wgt * rate_scale * std::polar(1.0, x * t);
            return out;
        };

        std::vector<double> breaks;
        if (g.center_y > g.y_lo && g.center_y < g.y_hi) breaks.push_back(g.center_y);
        for (int l = 0; l < 3; ++l) {
            const double y0 = -channel_offset(s, l);
            if (y0 > g.y_lo && y0 < g.y_hi) breaks.push_back(y0);
        }
        const auto core = quad::integrate(real_axis, g.y_lo, g.y_hi, bath_.quadrature.options, breaks);

        quad::Options tail_opt = bath_.quadrature.options;
        tail_opt.abs_tol = std::max(tail_opt.abs_tol, 0.1 * tail_opt.rel_tol * quad::norm(core.value));
        const double scale = std::max(g.width, 0.1 * (g.y_hi - g.y_lo));

        KernelPair total = core.value;
        double error = core.error;
        std::size_t evals = core.evaluations;
        auto add = [&](const auto& r) {
            total += r.value;
            error += r.error;
            evals += r.evaluations;
        };

        // At t = 0 nothing oscillates and the real-axis tail is well behaved;
        // on the vertical line the Bose factor would not decay.
        if (!g.rotate_tails || t == 0.0) {
            add(quad::integrate_to_infinity(real_axis, g.y_hi, scale, tail_opt));
        } else {
            // Tail edge at y = edge, direction +1 (right) or -1 (left).
            auto tail = [&](double edge, double dir) {
                auto flat = [&](double u) -> KernelPair {
                    const double y = edge + dir * u;
                    KernelPair out;
                    out(0) = i1 * weight(y) / (offset + y);
                    out(1) = 0.0;
                    return out;
                };
                add(quad::integrate_to_infinity(flat, 0.0, scale, tail_opt));
                // Right tail: int_X^inf = i int_0^inf dv at X + iv; left tail picks
                // up the opposite orientation.
                auto vertical = [&](double v) -> KernelPair {
                    const cplx w = cplx{g.anchor + edge, v};
                    cplx wgt = spectral_continuation(s, w);
                    if (thermal) wgt *= mean_occupation(w, temperature);
                    const cplx z{offset + edge, v};
                    const cplx phase = std::exp(i1 * z * t);
                    KernelPair out;
                    out(0) = dir * wgt * phase / z;
                    out(1) = dir * i1 * wgt * rate_scale * phase;
                    return out;
                };
                add(quad::integrate_to_infinity(vertical, 0.0, scale, tail_opt));
            };
            tail(g.y_hi, 1.0);
            if (g.lower_tail) tail(g.y_lo, -1.0);
        }
        return {total(0), total(1) / rate_scale, error, evals};
    }

    BathConfig bath_;
    ChiralQubitParams params_;
};

}  // namespace detail

/// Tabulates Gamma_l, Gamma'_l and their time derivatives on `times`
/// (ascending, starting at 0). Time points are distributed over
/// `bath.threads` workers; the result does not depend on the thread count.
inline KernelTable compute_kernels(const BathConfig& bath, const ChiralQubitParams& params,
                                   std::span<const double> times) {
    if (times.empty()) throw ConfigError("kernel time grid is empty");
    if (times.front() != 0.0) throw ConfigError("kernel time grid must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ConfigError("kernel time grid must be strictly ascending");

    const detail::KernelIntegrator integrator(bath, params);
    KernelTable table;
    const std::size_t n = times.size();
    table.times.assign(times.begin(), times.end());
    table.temperature = bath.temperature;
    for (int l = 0; l < 3; ++l) {
        table.gamma[l].assign(n, cplx{});
        table.gamma_prime[l].assign(n, cplx{});
        table.dgamma[l].assign(n, cplx{});
        table.dgamma_prime[l].assign(n, cplx{});
    }
    std::vector<double> errors(n, 0.0);
    std::vector<std::size_t> evals(n, 0);

    parallel_for(
        n,
        [&](std::size_t i) {
            const double t = times[i];
            for (int l = 0; l < 3; ++l) {
                const auto vac = integrator.vacuum(l, t);
                errors[i] = std::max(errors[i], vac.error);
                evals[i] += vac.evaluations;
                cplx g{}, dg{};
                if (integrator.thermal_active()) {
                    const auto th = integrator.thermal(l, t);
                    g = th.value;
                    dg = th.rate;
                    errors[i] = std::max(errors[i], th.error);
                    evals[i] += th.evaluations;
                }
                if (t == 0.0) {
                    // Both kernels vanish identically at t = 0.
                    table.gamma[l][i] = cplx{};
                    table.gamma_prime[l][i] = cplx{};
                } else {
                    table.gamma[l][i] = g;
                    table.gamma_prime[l][i] = vac.value + g;
                }
                table.dgamma[l][i] = dg;
                table.dgamma_prime[l][i] = vac.rate + dg;
            }
        },
        bath.threads);

    for (std::size_t i = 0; i < n; ++i) {
        table.max_error = std::max(table.max_error, errors[i]);
        table.evaluations += evals[i];
    }
    return table;
}

/// Fills the decay rates of `table` from its kernels.
inline void decay_rates(KernelTable& table, const RateWeights& w) {
    const std::size_t n = table.size();
    table.rate_z.resize(n);
    table.rate_plus.resize(n);
    table.rate_minus.resize(n);
    table.drate_z.resize(n);
    table.drate_plus.resize(n);
    table.drate_minus.resize(n);
    const auto& g = table.gamma;
    const auto& gp = table.gamma_prime;
    const auto& dg = table.dgamma;
    const auto& dgp = table.dgamma_prime;
    for (std::size_t i = 0; i < n; ++i) {
        table.rate_z[i] = w.w_z * (g[0][i].real() + gp[0][i].real());
        table.rate_plus[i] = w.w_plus * g[1][i].real() + w.w_minus * gp[2][i].real();
        table.rate_minus[i] = w.w_minus * g[2][i].real() + w.w_plus * gp[1][i].real();
        table.drate_z[i] = w.w_z * (dg[0][i].real() + dgp[0][i].real());
        table.drate_plus[i] = w.w_plus * dg[1][i].real() + w.w_minus * dgp[2][i].real();
        table.drate_minus[i] = w.w_minus * dg[2][i].real() + w.w_plus * dgp[1][i].real();
    }
    table.has_rates = true;
}

inline void decay_rates(KernelTable& table, const InteractionCoefficients& c) {
    decay_rates(table, RateWeights::from(c));
}

/// t -> infinity limit of Re Gamma'_l (emission = true) or Re Gamma_l:
/// pi J(omega_l) (nbar + 1) or pi J(omega_l) nbar. Frequencies outside the
/// positive axis carry no thermal weight.
inline double markov_limit(const SpectralDensity& s, double temperature, double omega_l, bool emission) {
    const double j = spectral_eval(s, omega_l);
    const double nbar = omega_l > 0.0 ? mean_occupation(omega_l, temperature) : 0.0;
    return std::numbers::pi * j * (emission ? nbar + 1.0 : nbar);
}

/// Uniform grid 0, dt, ..., t_max with `points` entries.
inline std::vector<double> uniform_grid(double t_max, std::size_t points) {
    if (points < 2) return {0.0};
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
}

}  // namespace chiral
