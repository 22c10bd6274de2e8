// Which initial state on the Bloch sphere keeps its entropy lowest?
#include <cstdio>
#include <numbers>

#include "chiral/observables.hpp"

int main() {
    using namespace chiral;
    const double omega0 = 1000.0;
    for (double detuning : {0.1, 10.0}) {
        const auto p = params_from_ratio(100.0, 0.9, omega0 - detuning);
        BathConfig bath;
        bath.spectral = Lorentzian{1.0, 1.0, omega0};
        bath.temperature = p.omega_so;

        const auto scan = pointer_scan(bath, p, theta_grid(31), uniform_grid(2.0, 201));
        std::printf("detuning %5.1f: theta_p = %.3f pi, mean entropy %.3e (theta = 0 gives %.3e)\n", detuning,
                    scan.theta_p / std::numbers::pi, scan.score[scan.index_p], scan.score.front());
    }
}
