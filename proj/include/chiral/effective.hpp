#pragma once

// Driven chirality qubit in the frame rotating at the drive frequency, and the
// dressed basis that diagonalizes it.

#include <algorithm>
#include <cmath>

#include "chiral/errors.hpp"
#include "chiral/linalg.hpp"

namespace chiral {

struct ChiralQubitParams {
    double omega_so = 0.0;
    double omega = 0.0;
    double eps = 0.0;
    double d = 0.0;
    /// Drive phase. Kept for completeness; every scenario uses 0.
    double beta = 0.0;

    // derived
    double delta_so = 0.0;
    double omega_s = 0.0;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double delta_zero = 0.0;

    double drive() const { return d * eps; }
};

inline ChiralQubitParams make_params(double omega_so, double omega, double eps, double d,
                                     double beta = 0.0) {
    if (eps < 0.0 || d < 0.0) throw ConfigError("field magnitude and dipole strength must be >= 0");
    ChiralQubitParams p{omega_so, omega, eps, d, beta};
    p.delta_so = omega_so - omega;
    p.omega_s = std::hypot(p.delta_so, d * eps);
    if (!(p.omega_s > 0.0)) throw ZeroSplitting("dressed splitting omega_s vanishes");
    // delta_+- = (omega_s +- delta_so) / (2 omega_s); the smaller one goes through
    // (d eps)^2 = (omega_s + delta_so)(omega_s - delta_so) to avoid cancellation.
    const double de2 = (d * eps) * (d * eps);
    if (p.delta_so >= 0.0) {
        p.delta_minus = de2 / (2.0 * p.omega_s * (p.omega_s + p.delta_so));
        p.delta_plus = 1.0 - p.delta_minus;
    } else {
        p.delta_plus = de2 / (2.0 * p.omega_s * (p.omega_s - p.delta_so));
        p.delta_minus = 1.0 - p.delta_plus;
    }
    p.delta_zero = std::sqrt(p.delta_plus * p.delta_minus);
    return p;
}

/// Builds parameters from the dimensionless scenario ratios: dressed splitting
/// omega_s, Delta_so / omega_s and the absolute drive frequency omega.
inline ChiralQubitParams params_from_ratio(double omega_s, double ratio, double omega, double d = 1.0) {
    if (!(omega_s > 0.0)) throw ZeroSplitting("omega_s must be positive");
    if (std::abs(ratio) > 1.0) throw ConfigError("|Delta_so / omega_s| must not exceed 1");
    if (!(d > 0.0)) throw ConfigError("dipole strength must be positive");
    const double delta_so = ratio * omega_s;
    const double drive = omega_s * std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
    return make_params(delta_so + omega, omega, drive / d, d);
}

/// Rotating-frame Hamiltonian (Delta_so C_z + d eps C_x)/2 in the
/// {|chi_+,1/2>, |chi_-,1/2>} basis.
inline Mat2 rotating_frame_hamiltonian(const ChiralQubitParams& p) {
    return 0.5 * (p.delta_so * pauli::z() + p.drive() * pauli::x());
}

/// Columns are |psi_+>, |psi_->. det U = +1.
struct DressedBasis {
    Mat2 transformation;

    explicit DressedBasis(const ChiralQubitParams& p) {
        const double a = std::sqrt(p.delta_plus);
        const double b = std::sqrt(p.delta_minus);
        transformation << a, -b, b, a;
    }

    Mat2 to_dressed(const Mat2& m) const { return transformation.adjoint() * m * transformation; }
    Mat2 from_dressed(const Mat2& m) const { return transformation * m * transformation.adjoint(); }
};

/// diag(+omega_s/2, -omega_s/2) in the |up>, |down> dressed ordering.
inline Mat2 dressed_hamiltonian(const ChiralQubitParams& p) {
    Mat2 h = Mat2::Zero();
    h(0, 0) = 0.5 * p.omega_s;
    h(1, 1) = -0.5 * p.omega_s;
    return h;
}

/// Coefficients of B^dagger = c_z Cbar_z + c_plus Cbar_+ + c_minus Cbar_- (phases stripped).
struct InteractionCoefficients {
    double c_z = 0.0;
    double c_plus = 0.0;
    double c_minus = 0.0;
};

inline InteractionCoefficients dressed_interaction_coefficients(const ChiralQubitParams& p) {
    return {p.delta_zero, p.delta_plus, -p.delta_minus};
}

}  // namespace chiral
