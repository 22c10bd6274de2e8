#pragma once

// Exact diagonalization of the three-site spin-1/2 triangle with Heisenberg
// exchange and Dzyaloshinskii-Moriya couplings. Sites are ordered s1 (x) s2 (x) s3,
// with |up> as the first basis vector of each site.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "chiral/errors.hpp"
#include "chiral/linalg.hpp"

namespace chiral::microscopic {

using Vec3 = Eigen::Vector3d;

struct TrimerParams {
    /// J_{12}, J_{23}, J_{31}
    std::array<double, 3> exchange{1.0, 1.0, 1.0};
    /// D_{12}, D_{23}, D_{31}
    std::array<Vec3, 3> dm_vectors{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    double d_over_j = 0.0;

    static TrimerParams isotropic(double j, double d) {
        TrimerParams p;
        p.exchange = {j, j, j};
        p.dm_vectors = {Vec3(0, 0, d), Vec3(0, 0, d), Vec3(0, 0, d)};
        p.d_over_j = j != 0.0 ? d / j : 0.0;
        return p;
    }

    double energy_scale() const {
        double s = 0.0;
        for (int b = 0; b < 3; ++b) {
            s = std::max({s, std::abs(exchange[b]), dm_vectors[b].norm()});
        }
        return s;
    }
};

struct TrimerSpectrum {
    Eigen::Matrix<double, 8, 1> eigenvalues;
    Mat8 eigenvectors;
    std::array<int, 4> ground_multiplet{};
    double omega_so = 0.0;
};

struct EffectiveDoublet {
    double omega_so = 0.0;
    /// Set when the two chirality levels coincide within the degeneracy tolerance.
    bool degenerate = false;
    /// Chirality eigenstates |chi_+, 1/2>, |chi_-, 1/2> on the full 8-dim space.
    Vec8 chi_plus;
    Vec8 chi_minus;
    /// <chi_a|H|chi_b> with the mean level removed.
    Mat2 projection;
    double off_diagonal = 0.0;
};

/// Relative (to the largest coupling) tolerance for grouping levels.
inline constexpr double degeneracy_tolerance = 1e-9;

namespace detail {

inline Mat2 spin_half(int axis) {
    switch (axis) {
        case 0: return 0.5 * pauli::x();
        case 1: return 0.5 * pauli::y();
        default: return 0.5 * pauli::z();
    }
}

inline Mat8 kron3(const Mat2& a, const Mat2& b, const Mat2& c) {
    Mat8 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    for (int m = 0; m < 2; ++m)
                        for (int n = 0; n < 2; ++n)
                            out(4 * i + 2 * k + m, 4 * j + 2 * l + n) = a(i, j) * b(k, l) * c(m, n);
    return out;
}

}  // namespace detail

/// Spin component `axis` (0=x, 1=y, 2=z) of site `site` (0-based).
inline Mat8 site_spin(int site, int axis) {
    const Mat2 id = Mat2::Identity();
    const Mat2 s = detail::spin_half(axis);
    switch (site) {
        case 0: return detail::kron3(s, id, id);
        case 1: return detail::kron3(id, s, id);
        default: return detail::kron3(id, id, s);
    }
}

inline Mat8 total_spin(int axis) {
    return site_spin(0, axis) + site_spin(1, axis) + site_spin(2, axis);
}

inline Mat8 total_spin_squared() {
    Mat8 s2 = Mat8::Zero();
    for (int a = 0; a < 3; ++a) {
        const Mat8 s = total_spin(a);
        s2 += s * s;
    }
    return s2;
}

inline Mat8 spin_dot(int i, int j) {
    Mat8 out = Mat8::Zero();
    for (int a = 0; a < 3; ++a) out += site_spin(i, a) * site_spin(j, a);
    return out;
}

/// Components of s_i x s_j.
inline std::array<Mat8, 3> spin_cross(int i, int j) {
    std::array<Mat8, 3> out;
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3;
        const int c = (a + 2) % 3;
        out[a] = site_spin(i, b) * site_spin(j, c) - site_spin(i, c) * site_spin(j, b);
    }
    return out;
}

inline Mat8 build_trimer_hamiltonian(const TrimerParams& p) {
    Mat8 h = Mat8::Zero();
    for (int bond = 0; bond < 3; ++bond) {
        const int i = bond;
        const int j = (bond + 1) % 3;
        h += p.exchange[bond] * spin_dot(i, j);
        const auto cross = spin_cross(i, j);
        for (int a = 0; a < 3; ++a) h += p.dm_vectors[bond](a) * cross[a];
    }
    return h;
}

/// C_z = (4/sqrt 3) s1 . (s2 x s3)
inline Mat8 chirality_operator_z() {
    const auto cross = spin_cross(1, 2);
    Mat8 c = Mat8::Zero();
    for (int a = 0; a < 3; ++a) c += site_spin(0, a) * cross[a];
    return (4.0 / std::sqrt(3.0)) * c;
}

inline TrimerSpectrum trimer_spectrum(const TrimerParams& p) {
    Eigen::SelfAdjointEigenSolver<Mat8> es(build_trimer_hamiltonian(p));
    TrimerSpectrum s;
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors();
    s.ground_multiplet = {0, 1, 2, 3};
    // The quadruplet may be split by the DM term into two doublets; omega_so is
    // the gap between them.
    s.omega_so = s.eigenvalues(2) - s.eigenvalues(0);
    if (s.omega_so <= degeneracy_tolerance * std::max(p.energy_scale(), 1e-300)) s.omega_so = 0.0;
    return s;
}

/// Projects H0 onto the S_z = +1/2, S = 1/2 doublet in the chirality eigenbasis.
/// omega_so is the signed splitting E(chi_+) - E(chi_-).
inline EffectiveDoublet derive_effective(const TrimerParams& p) {
    // S_z = +1/2 sector: one down spin. Index = 4*s1 + 2*s2 + s3 with down = 1.
    constexpr std::array<int, 3> sector{4, 2, 1};  // |dn up up>, |up dn up>, |up up dn>
    const Mat8 cz = chirality_operator_z();

    Eigen::Matrix3cd cz_sector;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) cz_sector(a, b) = cz(sector[a], sector[b]);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(cz_sector);
    // Eigenvalues ascending: -1 (chi_-), 0 (S = 3/2), +1 (chi_+).
    auto embed = [&](const Eigen::Vector3cd& v) {
        Vec8 out = Vec8::Zero();
        for (int a = 0; a < 3; ++a) out(sector[a]) = v(a);
        // Phase convention: the |dn up up> amplitude is real and positive.
        const cplx ref = out(sector[0]);
        if (std::abs(ref) > 0.0) out *= std::conj(ref) / std::abs(ref);
        return out;
    };

    EffectiveDoublet eff;
    eff.chi_plus = embed(es.eigenvectors().col(2));
    eff.chi_minus = embed(es.eigenvectors().col(0));

    const Mat8 h = build_trimer_hamiltonian(p);
    const std::array<const Vec8*, 2> basis{&eff.chi_plus, &eff.chi_minus};
    Mat2 proj;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) proj(a, b) = basis[a]->dot(h * *basis[b]);
    const cplx mean = 0.5 * proj.trace();
    proj -= mean * Mat2::Identity();

    eff.projection = proj;
    eff.off_diagonal = std::max(std::abs(proj(0, 1)), std::abs(proj(1, 0)));
    eff.omega_so = (proj(0, 0) - proj(1, 1)).real();
    if (std::abs(eff.omega_so) <= degeneracy_tolerance * std::max(p.energy_scale(), 1e-300)) {
        eff.omega_so = 0.0;
        eff.degenerate = true;
    }
    return eff;
}

}  // namespace chiral::microscopic
