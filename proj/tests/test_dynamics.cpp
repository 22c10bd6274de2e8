#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "chiral/dynamics.hpp"
#include "test_support.hpp"

using namespace chiral;

namespace {

DensityMatrix2 up() {
    DensityMatrix2 r = DensityMatrix2::Zero();
    r(0, 0) = 1.0;
    return r;
}

Mat2 random_hermitian(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat2 a;
    a << cplx{n(rng), n(rng)}, cplx{n(rng), n(rng)}, cplx{n(rng), n(rng)}, cplx{n(rng), n(rng)};
    return a + a.adjoint();
}

}  // namespace

// dP/dt = (g+ - g-) - (g+ + g-) P and rho_01 ~ exp(-i omega_s t - ((g+ + g-)/2 + 2 gz) t).
TEST(Dynamics, ConstantRatesMatchLindbladSolution) {
    const auto p = params_from_ratio(10.0, 0.4, 100.0);
    const double gz = 0.05, gp = 0.02, gm = 0.3;
    const auto k = constant_rate_table(3.0, gz, gp, gm);
    const auto times = uniform_grid(3.0, 31);
    const DensityMatrix2 rho0 = bloch_to_state({1.0, 0.3});
    const auto tr = propagate(rho0, k, p, times);
    const double sum = gp + gm, pss = (gp - gm) / sum, g2 = 0.5 * sum + 2.0 * gz;
    const double p0 = polarization(rho0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        EXPECT_NEAR(tr.polarization[i], pss + (p0 - pss) * std::exp(-sum * t), 1e-8);
        const cplx coh = rho0(0, 1) * std::exp(cplx{-g2 * t, -p.omega_s * t});
        EXPECT_LT(std::abs(tr.states[i](0, 1) - coh), 1e-8);
    }
    const auto pa = analytic_polarization(k, times);
    EXPECT_NEAR(pa.back(), pss + (1.0 - pss) * std::exp(-sum * 3.0), 1e-12);
}

TEST(Dynamics, ClosedFormAgreesWithIntegrator) {
    BathConfig bath;
    bath.spectral = Lorentzian{1.0, 1.0, 1000.0};
    const auto p = params_from_ratio(100.0, 0.7, 999.9);
    bath.temperature = p.omega_so;
    const auto times = uniform_grid(2.0, 101);
    auto k = compute_kernels(bath, p, times);
    decay_rates(k, dressed_interaction_coefficients(p));
    const auto tr = propagate(up(), k, p, times);
    const auto pa = analytic_polarization(k, times);
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(tr.polarization[i], pa[i], 1e-7);
}

TEST(Dynamics, UncoupledBathLeavesPolarizationAtOne) {
    BathConfig bath;
    bath.spectral = Lorentzian{0.0, 1.0, 1000.0};
    const auto p = params_from_ratio(100.0, 0.4, 999.9);
    bath.temperature = p.omega_so;
    const auto tr = propagate(up(), bath, p, uniform_grid(2.0, 21));
    for (double v : tr.polarization) EXPECT_EQ(v, 1.0);
    for (double e : tr.entropy) EXPECT_EQ(e, 0.0);
}

TEST(Dynamics, GeneratorIsTracelessAndHermiticityPreserving) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Mat2 rho = random_hermitian(rng);
        const Rates r{u(rng), u(rng), u(rng)};
        const Mat2 d = lindblad_generator(rho, r, dressed_hamiltonian(params_from_ratio(5.0, u(rng), 3.0)));
        EXPECT_LT(std::abs(d.trace()), 1e-13);
        EXPECT_LT(hermiticity_defect(d), 1e-13);
    }
}

TEST(Dynamics, NonsecularTermIsTracelessAndHermitian) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const Mat2 rho = random_hermitian(rng);
        std::array<cplx, 3> g, gp;
        for (int l = 0; l < 3; ++l) g[l] = {n(rng), n(rng)}, gp[l] = {n(rng), n(rng)};
        const auto p = params_from_ratio(100.0, u(rng), 999.0);
        const Mat2 d = nonsecular_term(rho, g, gp, p);
        EXPECT_LT(std::abs(d.trace()), 1e-10);
        EXPECT_LT(hermiticity_defect(d), 1e-10);
    }
}

TEST(Dynamics, NonsecularTermVanishesWithoutKernels) {
    const std::array<cplx, 3> zero{};
    EXPECT_EQ(nonsecular_term(up(), zero, zero, params_from_ratio(100.0, 0.4, 999.9)).norm(), 0.0);
}

TEST(Dynamics, NonsecularCorrectionSmallForLargeSplitting) {
    BathConfig bath;
    bath.spectral = Lorentzian{1.0, 1.0, 1000.0};
    const auto p = params_from_ratio(100.0, 0.4, 999.9);
    bath.temperature = p.omega_so;
    const auto times = uniform_grid(2.0, 101);
    auto k = compute_kernels(bath, p, times);
    decay_rates(k, dressed_interaction_coefficients(p));
    PropagationOptions o;
    o.include_nonsecular = true;
    const auto a = propagate(up(), k, p, times);
    const auto b = propagate(up(), k, p, times, o);
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_LT(std::abs(a.polarization[i] - b.polarization[i]), 0.05);
    EXPECT_LT(b.max_trace_defect, 1e-10);
    EXPECT_LT(b.max_hermiticity_defect, 1e-12);
}

TEST(Dynamics, ConservationAlongTrajectory) {
    BathConfig bath;
    bath.spectral = Lorentzian{1.0, 1.0, 1000.0};
    const auto p = params_from_ratio(100.0, 0.9, 999.9);
    bath.temperature = p.omega_so;
    const auto tr = propagate(bloch_to_state({0.5 * std::numbers::pi, 0.0}), bath, p, uniform_grid(2.0, 101));
    EXPECT_LT(tr.max_trace_defect, 1e-10);
    EXPECT_LT(tr.max_hermiticity_defect, 1e-12);
    EXPECT_LT(tr.max_negativity, 1e-4);
    for (double e : tr.entropy) {
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, std::numbers::ln2);
    }
}

TEST(Dynamics, InputValidation) {
    const auto p = params_from_ratio(10.0, 0.4, 100.0);
    auto k = constant_rate_table(1.0, 0.1, 0.1, 0.1);
    DensityMatrix2 bad = up();
    bad(1, 1) = 0.5;
    EXPECT_THROW(propagate(bad, k, p, std::vector<double>{0.0, 1.0}), InvalidState);
    EXPECT_THROW(propagate(up(), k, p, std::vector<double>{0.0, 2.0}), ConfigError);
    EXPECT_THROW(propagate(up(), k, p, std::vector<double>{0.5, 0.2}), ConfigError);
    k.has_rates = false;
    EXPECT_THROW(propagate(up(), k, p, std::vector<double>{0.0, 1.0}), ConfigError);
}
