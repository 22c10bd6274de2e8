#pragma once

// Brute-force reference: the qubit plus a handful of explicit bath modes,
// evolved exactly from the vacuum. Used to certify the TCL2 pipeline at weak
// coupling.

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

#include "chiral/effective.hpp"
#include "chiral/errors.hpp"
#include "chiral/linalg.hpp"
#include "chiral/quadrature.hpp"
#include "chiral/spectral_density.hpp"

namespace chiral::oracle {

struct Mode {
    double coupling = 0.0;
    double omega = 0.0;
};

struct DiscretizedBath {
    std::vector<Mode> modes;
    int fock_cutoff = 2;
    /// int J over the window, and the part of the total mass outside it.
    double window_mass = 0.0;
    double tail_mass = 0.0;
};

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

inline constexpr std::size_t max_modes = 8;
inline constexpr int max_fock_cutoff = 3;
inline constexpr std::size_t max_dimension = 4096;
inline constexpr double max_tail_fraction = 1e-3;

namespace detail {

inline quad::Options mass_options() { return {0.0, 1e-13, 50000}; }

inline double mass(const SpectralDensity& s, double a, double b) {
    const auto sup = spectral_support(s);
    std::vector<double> breaks;
    if (sup.center > a && sup.center < b) breaks.push_back(sup.center);
    return quad::integrate([&](double w) { return spectral_eval(s, w); }, a, b, mass_options(), breaks).value;
}

/// Total weight of J over its natural domain: the full line for the
/// Lorentzian, the positive axis otherwise.
inline double total_mass(const SpectralDensity& s) {
    if (const auto* l = std::get_if<Lorentzian>(&s)) return 0.5 * l->alpha * l->alpha * l->lambda;
    const auto sup = spectral_support(s);
    const double hi = sup.center + sup.width;
    auto f = [&](double w) { return spectral_eval(s, w); };
    return mass(s, 0.0, hi) + quad::integrate_to_infinity(f, hi, sup.width, mass_options()).value;
}

}  // namespace detail

/// Splits the window into N bins of equal spectral mass. Mode j sits at the
/// mass median of its bin with g_j^2 = int_bin J.
inline DiscretizedBath discretize(const SpectralDensity& s, std::size_t n, Window window, int fock_cutoff = 2) {
    validate(s);
    if (n < 1 || n > max_modes) throw ConfigError("oracle mode count must be in [1, 8]");
    if (fock_cutoff < 1 || fock_cutoff > max_fock_cutoff) throw ConfigError("oracle Fock cutoff must be in [1, 3]");
    if (!(window.hi > window.lo)) throw WindowError("discretization window is empty");
    if (!std::holds_alternative<Lorentzian>(s) && window.lo < 0.0)
        throw WindowError("discretization window extends below zero frequency");

    DiscretizedBath bath;
    bath.fock_cutoff = fock_cutoff;
    bath.window_mass = detail::mass(s, window.lo, window.hi);
    const double total = detail::total_mass(s);
    bath.tail_mass = std::max(0.0, total - bath.window_mass);
    if (!(total > 0.0) || bath.tail_mass > max_tail_fraction * total) {
        std::ostringstream msg;
        msg << "window [" << window.lo << ", " << window.hi << "] misses spectral mass " << bath.tail_mass
            << " of " << total;
        throw WindowError(msg.str());
    }

    // Cumulative mass inverted by bracketing root search.
    auto quantile = [&](double target) {
        auto g = [&](double w) { return detail::mass(s, window.lo, w) - target; };
        boost::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(
            g, window.lo, window.hi, -target, bath.window_mass - target,
            [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(a)); }, iters);
        return 0.5 * (r.first + r.second);
    };
    const double share = bath.window_mass / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double median = (static_cast<double>(j) + 0.5) * share;
        bath.modes.push_back({std::sqrt(share), quantile(median)});
    }
    return bath;
}

enum class InitialState { dressed_up, bare_chi_plus };

struct ExactResult {
    std::vector<double> times;
    /// Tr[rho Cbar_z] in the dressed basis.
    std::vector<double> polarization;
    /// <C_z> in the bare chirality basis.
    std::vector<double> bare_polarization;
    double max_norm_defect = 0.0;
    double max_trace_defect = 0.0;
};

inline std::size_t hilbert_dimension(const DiscretizedBath& bath) {
    std::size_t dim = 2;
    for (std::size_t j = 0; j < bath.modes.size(); ++j) {
        dim *= static_cast<std::size_t>(bath.fock_cutoff + 1);
        if (dim > max_dimension) break;
    }
    return dim;
}

/// Rotating-frame Hamiltonian (Delta C_z + d eps C_x)/2 + sum (w_j - w) b^dag b
/// + sum g_j (b^dag C_- + b C_+) on qubit (x) Fock^N, qubit index slowest.
inline MatX exact_hamiltonian(const ChiralQubitParams& p, const DiscretizedBath& bath) {
    const std::size_t dim = hilbert_dimension(bath);
    if (dim > max_dimension) {
        std::ostringstream msg;
        msg << "oracle Hilbert space exceeds " << max_dimension << " states";
        throw DimensionError(msg.str());
    }
    const std::size_t nb = dim / 2;
    const int levels = bath.fock_cutoff + 1;
    const std::size_t nmodes = bath.modes.size();
    auto occupation = [&](std::size_t b, std::size_t j) {
        for (std::size_t k = 0; k < j; ++k) b /= static_cast<std::size_t>(levels);
        return static_cast<int>(b % static_cast<std::size_t>(levels));
    };
    std::vector<std::size_t> stride(nmodes, 1);
    for (std::size_t j = 1; j < nmodes; ++j) stride[j] = stride[j - 1] * static_cast<std::size_t>(levels);

    MatX h = MatX::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const Mat2 hs = rotating_frame_hamiltonian(p);
    for (std::size_t b = 0; b < nb; ++b) {
        double e_bath = 0.0;
        for (std::size_t j = 0; j < nmodes; ++j) e_bath += (bath.modes[j].omega - p.omega) * occupation(b, j);
        for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c) h(a * nb + b, c * nb + b) += hs(a, c);
            h(a * nb + b, a * nb + b) += e_bath;
        }
        // g b_j^dag C_-: |chi_+> (index 0) -> |chi_-> (index 1), one quantum added.
        for (std::size_t j = 0; j < nmodes; ++j) {
            const int n = occupation(b, j);
            if (n + 1 >= levels) continue;
            const std::size_t b_up = b + stride[j];
            const double amp = bath.modes[j].coupling * std::sqrt(static_cast<double>(n + 1));
            h(1 * nb + b_up, 0 * nb + b) += amp;
            h(0 * nb + b, 1 * nb + b_up) += amp;
        }
    }
    return h;
}

inline ExactResult exact_evolve(const ChiralQubitParams& p, const DiscretizedBath& bath, std::span<const double> times,
                                InitialState initial = InitialState::dressed_up) {
    const MatX h = exact_hamiltonian(p, bath);
    const Eigen::Index dim = h.rows();
    const Eigen::Index nb = dim / 2;
    Eigen::SelfAdjointEigenSolver<MatX> es(h);
    const MatX& v = es.eigenvectors();
    const Eigen::VectorXd& e = es.eigenvalues();

    const DressedBasis basis(p);
    VecX psi0 = VecX::Zero(dim);
    if (initial == InitialState::dressed_up) {
        psi0(0) = basis.transformation(0, 0);
        psi0(nb) = basis.transformation(1, 0);
    } else {
        psi0(0) = 1.0;
    }
    const VecX c0 = v.adjoint() * psi0;

    ExactResult out;
    out.times.assign(times.begin(), times.end());
    for (double t : times) {
        VecX ct(dim);
        for (Eigen::Index k = 0; k < dim; ++k) ct(k) = c0(k) * std::polar(1.0, -e(k) * t);
        const VecX psi = v * ct;
        out.max_norm_defect = std::max(out.max_norm_defect, std::abs(psi.squaredNorm() - 1.0));
        // Reduced qubit state: trace over the bath block index.
        Mat2 rho;
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c)
                rho(a, c) = psi.segment(c * nb, nb).dot(psi.segment(a * nb, nb));
        out.max_trace_defect = std::max(out.max_trace_defect, std::abs(rho.trace() - 1.0));
        out.bare_polarization.push_back((rho(0, 0) - rho(1, 1)).real());
        const Mat2 dressed = basis.to_dressed(rho);
        out.polarization.push_back((dressed(0, 0) - dressed(1, 1)).real());
    }
    return out;
}

}  // namespace chiral::oracle
