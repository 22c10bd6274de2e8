#pragma once

// Time-local second-order master equation for the dressed qubit:
//
//   d rho/dt = -i[H, rho] + L_t[rho] (+ O_t[rho])
//
// L_t is the Lindblad form with the tabulated rates; O_t is the optional
// non-secular correction built from the complex kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include "chiral/effective.hpp"
#include "chiral/errors.hpp"
#include "chiral/interpolation.hpp"
#include "chiral/kernels.hpp"
#include "chiral/linalg.hpp"
#include "chiral/state.hpp"

namespace chiral {

struct Rates {
    double z = 0.0;
    double plus = 0.0;
    double minus = 0.0;
};

struct PropagationOptions {
    bool include_nonsecular = false;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double initial_step = 1e-4;
    /// Upper bound on the step; 0 leaves it to the controller.
    double max_step = 0.0;
    double positivity_tolerance = default_positivity_tolerance;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix2> states;
    std::vector<double> polarization;
    std::vector<double> entropy;
    std::vector<Rates> rates;
    /// Largest -eigenvalue seen over the reported states (0 if always positive).
    double max_negativity = 0.0;
    /// Set when max_negativity exceeds the positivity tolerance.
    bool positivity_violated = false;
    double max_trace_defect = 0.0;
    double max_hermiticity_defect = 0.0;
};

inline Mat2 dressed_cz() { return pauli::z(); }
inline Mat2 dressed_cplus() { return pauli::raising(); }
inline Mat2 dressed_cminus() { return pauli::lowering(); }

/// -i[H, rho] + sum_m gamma_m (C_m rho C_m^dag - {C_m^dag C_m, rho}/2)
inline Mat2 lindblad_generator(const DensityMatrix2& rho, const Rates& r, const Mat2& h) {
    Mat2 out = -I * commutator(h, rho);
    const std::array<std::pair<double, Mat2>, 3> channels{
        {{r.z, dressed_cz()}, {r.plus, dressed_cplus()}, {r.minus, dressed_cminus()}}};
    for (const auto& [g, c] : channels) {
        if (g == 0.0) continue;
        const Mat2 cdc = c.adjoint() * c;
        out += g * (c * rho * c.adjoint() - 0.5 * anticommutator(cdc, rho));
    }
    return out;
}

/// Non-secular increment, twelve products plus Hermitian conjugate.
/// `gamma`/`gamma_prime` are indexed by channel slot (0, +, -).
inline Mat2 nonsecular_term(const DensityMatrix2& rho, const std::array<cplx, 3>& gamma,
                            const std::array<cplx, 3>& gamma_prime, const ChiralQubitParams& p) {
    const Mat2 cz = dressed_cz();
    const Mat2 cp = dressed_cplus();
    const Mat2 cm = dressed_cminus();
    // a rho b - rho b a
    auto br = [&](const Mat2& a, const Mat2& b) -> Mat2 { return a * rho * b - rho * b * a; };
    const double d0p = p.delta_zero * p.delta_plus;
    const double d0m = p.delta_zero * p.delta_minus;
    const double dpm = p.delta_plus * p.delta_minus;

    Mat2 o = gamma[0] * (d0p * br(cz, cm) - d0m * br(cz, cp));
    o += gamma[1] * (d0p * br(cp, cz) - dpm * br(cp, cp));
    o -= gamma[2] * (d0m * br(cm, cz) + dpm * br(cm, cm));
    o += gamma_prime[0] * (d0p * br(cm, cz) - d0m * br(cp, cz));
    o += gamma_prime[1] * (d0p * br(cz, cp) - dpm * br(cp, cp));
    o -= gamma_prime[2] * (d0m * br(cz, cm) + dpm * br(cm, cm));
    return o + o.adjoint();
}

namespace detail {

using OdeState = std::array<double, 8>;

inline OdeState pack(const Mat2& m) {
    return {m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(),
            m(1, 0).real(), m(1, 0).imag(), m(1, 1).real(), m(1, 1).imag()};
}

inline Mat2 unpack(const OdeState& s) {
    Mat2 m;
    m << cplx{s[0], s[1]}, cplx{s[2], s[3]}, cplx{s[4], s[5]}, cplx{s[6], s[7]};
    return m;
}

inline Rates rates_at(const KernelSnapshot& k) { return {k.rate_z, k.rate_plus, k.rate_minus}; }

inline void require_rates(const KernelTable& table, std::span<const double> times) {
    if (!table.has_rates) throw ConfigError("kernel table has no decay rates");
    if (times.empty()) throw ConfigError("empty output time grid");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ConfigError("output times must be strictly ascending");
    if (times.front() < table.times.front() || times.back() > table.t_max() * (1.0 + 1e-12))
        throw ConfigError("output times leave the kernel table range");
}

}  // namespace detail

/// Integrates the master equation from rho0 at times.front() and reports the
/// state at every requested time. Rates and kernels are interpolated from
/// `kernels`.
inline Trajectory propagate(const DensityMatrix2& rho0, const KernelTable& kernels, const ChiralQubitParams& params,
                            std::span<const double> times, const PropagationOptions& opt = {}) {
    namespace odeint = boost::numeric::odeint;
    detail::require_rates(kernels, times);
    check_state(rho0, opt.positivity_tolerance);
    if (!(opt.abs_tol > 0.0) || !(opt.rel_tol > 0.0) || !(opt.initial_step > 0.0) || opt.max_step < 0.0)
        throw ConfigError("integrator tolerances and step sizes must be positive");

    const Mat2 h = dressed_hamiltonian(params);
    auto rhs = [&](const detail::OdeState& x, detail::OdeState& dxdt, double t) {
        const Mat2 rho = detail::unpack(x);
        const KernelSnapshot k = kernels.at(t);
        Mat2 d = lindblad_generator(rho, detail::rates_at(k), h);
        if (opt.include_nonsecular) d += nonsecular_term(rho, k.gamma, k.gamma_prime, params);
        dxdt = detail::pack(d);
    };

    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    auto observe = [&](const detail::OdeState& x, double t) {
        const Mat2 rho = detail::unpack(x);
        for (double v : x)
            if (!std::isfinite(v)) throw IntegratorFailure("state became non-finite");
        const auto defects = state_defects(rho);
        traj.max_negativity = std::max(traj.max_negativity, defects.negativity);
        traj.max_trace_defect = std::max(traj.max_trace_defect, defects.trace);
        traj.max_hermiticity_defect = std::max(traj.max_hermiticity_defect, defects.hermiticity);
        traj.states.push_back(rho);
        traj.polarization.push_back(polarization(rho));
        // Entropy is reported on the clamped spectrum; violations are recorded above.
        traj.entropy.push_back(von_neumann_entropy(rho, std::numeric_limits<double>::infinity()));
        traj.rates.push_back(detail::rates_at(kernels.at(t)));
    };

    detail::OdeState x = detail::pack(rho0);
    if (times.size() == 1) {
        observe(x, times.front());
        return traj;
    }
    using Stepper = odeint::runge_kutta_dopri5<detail::OdeState>;
    try {
        if (opt.max_step > 0.0) {
            auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, opt.max_step, Stepper());
            odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), opt.initial_step, observe);
        } else {
            auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, Stepper());
            odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), opt.initial_step, observe);
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw IntegratorFailure(std::string("adaptive integration failed: ") + e.what());
    }
    traj.positivity_violated = traj.max_negativity > opt.positivity_tolerance;
    return traj;
}

/// Computes kernels and rates on `times` and propagates on the same grid.
inline Trajectory propagate(const DensityMatrix2& rho0, const BathConfig& bath, const ChiralQubitParams& params,
                            std::span<const double> times, const PropagationOptions& opt = {}) {
    KernelTable table = compute_kernels(bath, params, times);
    decay_rates(table, dressed_interaction_coefficients(params));
    return propagate(rho0, table, params, times, opt);
}

/// Closed-form polarization for the initial state |up><up|:
///   P(t) = {1 + int_0^t e^{f(s)} (g+ - g-)(s) ds} e^{-f(t)},  f(t) = int_0^t (g+ + g-)
/// evaluated on the Hermite interpolant of the rates, so it is exact for the
/// same rate model the ODE sees.
inline std::vector<double> analytic_polarization(const KernelTable& table, std::span<const double> times) {
    detail::require_rates(table, times);
    if (times.front() != table.times.front()) throw ConfigError("analytic polarization starts at the table origin");
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& tt = table.times;

    // sum and difference of the rates, with derivatives, on the table nodes
    const std::size_t n = tt.size();
    std::vector<double> s(n), ds(n), d(n), dd(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = table.rate_plus[i] + table.rate_minus[i];
        ds[i] = table.drate_plus[i] + table.drate_minus[i];
        d[i] = table.rate_plus[i] - table.rate_minus[i];
        dd[i] = table.drate_plus[i] - table.drate_minus[i];
    }
    auto hermite = [&](const std::vector<double>& y, const std::vector<double>& dy, std::size_t k, double t) {
        const auto w = hermite_weights(tt[k], tt[k + 1], t);
        return w.h00 * y[k] + w.h10 * dy[k] + w.h01 * y[k + 1] + w.h11 * dy[k + 1];
    };
    // f(t) - f(tt[k]) inside interval k
    auto f_local = [&](std::size_t k, double t) {
        return hermite_integral(tt[k], tt[k + 1], s[k], ds[k], s[k + 1], ds[k + 1], t);
    };

    // Advances P from the left end of interval k to time t in it:
    //   P(t) = P_k e^{-(F(t))} + int_{t_k}^t e^{-(F(t) - F(u))} d(u) du,  F = f - f_k
    auto advance = [&](double p_k, std::size_t k, double t) {
        if (t == tt[k]) return p_k;
        const double ft = f_local(k, t);
        const double integral = Gauss::integrate(
            [&](double u) { return std::exp(f_local(k, u) - ft) * hermite(d, dd, k, u); }, tt[k], t);
        return p_k * std::exp(-ft) + integral;
    };

    std::vector<double> out;
    out.reserve(times.size());
    double p = 1.0;
    std::size_t k = 0;
    for (double t : times) {
        if (n == 1) {
            out.push_back(1.0);
            continue;
        }
        while (k + 2 < n && t > tt[k + 1]) p = advance(p, k, tt[k + 1]), ++k;
        out.push_back(advance(p, k, t));
    }
    return out;
}

}  // namespace chiral
