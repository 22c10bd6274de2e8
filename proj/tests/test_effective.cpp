#include <cmath>

#include <gtest/gtest.h>

#include "chiral/effective.hpp"

using namespace chiral;

namespace {

double eig_gap(const Mat2& h) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(h);
    return es.eigenvalues()(1) - es.eigenvalues()(0);
}

}  // namespace

TEST(Effective, MixingCoefficientsSumToOne) {
    for (double ratio : {-0.9, -0.1, 0.0, 0.4, 0.9, 1.0}) {
        const auto p = params_from_ratio(100.0, ratio, 999.9);
        EXPECT_NEAR(p.delta_plus + p.delta_minus, 1.0, 1e-15);
        EXPECT_NEAR(p.delta_zero * p.delta_zero, p.delta_plus * p.delta_minus, 1e-15);
        EXPECT_NEAR(p.delta_so / p.omega_s, ratio, 1e-14);
        EXPECT_NEAR(p.delta_plus, 0.5 * (1.0 + ratio), 1e-14);
    }
}

TEST(Effective, SplittingIsEigenvalueGap) {
    const auto p = make_params(3.0, 1.0, 1.5, 2.0);
    EXPECT_NEAR(p.omega_s, std::hypot(2.0, 3.0), 1e-14);
    EXPECT_NEAR(eig_gap(rotating_frame_hamiltonian(p)), p.omega_s, 1e-13);
}

TEST(Effective, DressedBasisDiagonalizesRotatingHamiltonian) {
    for (double ratio : {-0.7, 0.1, 0.4, 0.9}) {
        const auto p = params_from_ratio(100.0, ratio, 999.9);
        const DressedBasis u(p);
        EXPECT_LT((u.transformation.adjoint() * u.transformation - Mat2::Identity()).norm(), 1e-14);
        EXPECT_NEAR(u.transformation.determinant().real(), 1.0, 1e-14);
        const Mat2 hd = u.to_dressed(rotating_frame_hamiltonian(p));
        EXPECT_LT((hd - dressed_hamiltonian(p)).norm(), 1e-12 * p.omega_s);
    }
}

// U^dag C_+ U worked out by hand: sqrt(d+ d-) Cz + d+ C+ - d- C-.
TEST(Effective, InteractionOperatorInDressedBasis) {
    const auto p = params_from_ratio(100.0, 0.4, 999.9);
    const auto c = dressed_interaction_coefficients(p);
    const Mat2 expected = c.c_z * pauli::z() + c.c_plus * pauli::raising() + c.c_minus * pauli::lowering();
    EXPECT_LT((DressedBasis(p).to_dressed(pauli::raising()) - expected).norm(), 1e-14);
    EXPECT_DOUBLE_EQ(c.c_z, p.delta_zero);
    EXPECT_DOUBLE_EQ(c.c_plus, p.delta_plus);
    EXPECT_DOUBLE_EQ(c.c_minus, -p.delta_minus);
}

// Weak drive: delta_- ~ (d eps)^2 / (4 omega_s^2) must keep its digits.
TEST(Effective, SmallMixingWithoutCancellation) {
    const auto p = make_params(1.0, 0.0, 1e-9, 1.0);
    EXPECT_NEAR(p.delta_minus / (1e-18 / 4.0), 1.0, 1e-9);
    EXPECT_EQ(p.delta_plus, 1.0 - p.delta_minus);
}

TEST(Effective, Errors) {
    EXPECT_THROW(make_params(1.0, 1.0, 0.0, 1.0), ZeroSplitting);
    EXPECT_THROW(make_params(1.0, 0.0, -1.0, 1.0), ConfigError);
    EXPECT_THROW(params_from_ratio(0.0, 0.4, 1.0), ZeroSplitting);
    EXPECT_THROW(params_from_ratio(100.0, 1.2, 1.0), ConfigError);
    EXPECT_THROW(params_from_ratio(100.0, 0.4, 1.0, 0.0), ConfigError);
}
