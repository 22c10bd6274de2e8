// Chiral polarization P(t) for one point of the Delta_so/omega_s sweep,
// from the ODE and from the closed-form solution side by side.
#include <cstdio>

#include "chiral/dynamics.hpp"

int main() {
    using namespace chiral;
    const double omega0 = 1000.0;  // lambda = 1
    const auto p = params_from_ratio(100.0, 0.4, omega0 - 0.1);

    BathConfig bath;
    bath.spectral = Lorentzian{1.0, 1.0, omega0};
    bath.temperature = p.omega_so;

    // The kernels oscillate at omega_s, so the table needs omega_s dt well below 1.
    const auto times = uniform_grid(2.0, 401);
    KernelTable k = compute_kernels(bath, p, times);
    decay_rates(k, dressed_interaction_coefficients(p));

    DensityMatrix2 up = DensityMatrix2::Zero();
    up(0, 0) = 1.0;
    const auto tr = propagate(up, k, p, times);
    const auto exact = analytic_polarization(k, times);

    std::printf("%8s %22s %22s %12s\n", "t", "P (ode)", "P (closed form)", "gamma_+");
    for (std::size_t i = 0; i < times.size(); i += 20)
        std::printf("%8.3f %22.15f %22.15f %12.4e\n", times[i], tr.polarization[i], exact[i], k.rate_plus[i]);
}
