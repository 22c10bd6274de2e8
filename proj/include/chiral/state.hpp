#pragma once

// Qubit states in the dressed basis {|up>, |down>} and the scalar observables
// read off them.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "chiral/errors.hpp"
#include "chiral/linalg.hpp"

namespace chiral {

using DensityMatrix2 = Mat2;

inline constexpr double default_positivity_tolerance = 1e-6;

struct StateDefects {
    double hermiticity = 0.0;
    double trace = 0.0;
    /// max(0, -smallest eigenvalue)
    double negativity = 0.0;
};

inline std::array<double, 2> state_eigenvalues(const DensityMatrix2& rho) {
    const Mat2 h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat2> es(h, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

inline StateDefects state_defects(const DensityMatrix2& rho) {
    StateDefects d;
    d.hermiticity = hermiticity_defect(rho);
    d.trace = std::abs(rho.trace() - 1.0);
    d.negativity = std::max(0.0, -state_eigenvalues(rho)[0]);
    return d;
}

/// Throws InvalidState unless rho is Hermitian, unit-trace and positive
/// within the given tolerances.
inline void check_state(const DensityMatrix2& rho, double positivity_tolerance = default_positivity_tolerance) {
    const auto d = state_defects(rho);
    std::ostringstream msg;
    if (d.hermiticity > 1e-12) msg << "not Hermitian (defect " << d.hermiticity << ")";
    else if (d.trace > 1e-10) msg << "trace differs from 1 by " << d.trace;
    else if (d.negativity > positivity_tolerance) msg << "eigenvalue " << -d.negativity << " below tolerance";
    else return;
    throw InvalidState("invalid density matrix: " + msg.str());
}

/// Tr[rho Cbar_z]
inline double polarization(const DensityMatrix2& rho) { return (rho(0, 0) - rho(1, 1)).real(); }

/// -sum u ln u over the eigenvalues, with small negative eigenvalues clamped.
inline double von_neumann_entropy(const DensityMatrix2& rho,
                                  double positivity_tolerance = default_positivity_tolerance) {
    const auto u = state_eigenvalues(rho);
    if (u[0] < -positivity_tolerance) {
        std::ostringstream msg;
        msg << "entropy of a state with eigenvalue " << u[0];
        throw InvalidState(msg.str());
    }
    double e = 0.0;
    for (double x : u) {
        x = std::clamp(x, 0.0, 1.0);
        if (x > 0.0) e -= x * std::log(x);
    }
    return std::clamp(e, 0.0, std::numbers::ln2);
}

inline double purity(const DensityMatrix2& rho) { return (rho * rho).trace().real(); }

struct BlochState {
    double theta = 0.0;
    double phi = 0.0;
};

/// (I + V.C)/2 with V = (sin t cos p, sin t sin p, cos t).
inline DensityMatrix2 bloch_to_state(const BlochState& b) {
    const double vx = std::sin(b.theta) * std::cos(b.phi);
    const double vy = std::sin(b.theta) * std::sin(b.phi);
    const double vz = std::cos(b.theta);
    return 0.5 * (Mat2::Identity() + vx * pauli::x() + vy * pauli::y() + vz * pauli::z());
}

struct BlochVector {
    Eigen::Vector3d v;
    double purity = 1.0;
};

inline BlochVector state_to_bloch(const DensityMatrix2& rho) {
    BlochVector b;
    b.v = {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), polarization(rho)};
    b.purity = purity(rho);
    return b;
}

}  // namespace chiral
