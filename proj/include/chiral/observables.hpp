#pragma once

// Pointer-state search: the initial Bloch state whose entropy stays lowest.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "chiral/dynamics.hpp"
#include "chiral/errors.hpp"
#include "chiral/kernels.hpp"
#include "chiral/parallel.hpp"
#include "chiral/state.hpp"

namespace chiral {

enum class EntropyMeasure { time_average, maximum, final };

inline std::string measure_name(EntropyMeasure m) {
    switch (m) {
        case EntropyMeasure::maximum: return "max";
        case EntropyMeasure::final: return "final";
        default: return "time_average";
    }
}

inline EntropyMeasure parse_measure(const std::string& s) {
    if (s == "time_average") return EntropyMeasure::time_average;
    if (s == "max") return EntropyMeasure::maximum;
    if (s == "final") return EntropyMeasure::final;
    throw ConfigError("unknown entropy measure '" + s + "' (time_average, max, final)");
}

struct PointerScanOptions {
    EntropyMeasure measure = EntropyMeasure::time_average;
    double horizon = 2.0;
    /// Scores within this of the minimum count as ties; the smallest theta wins.
    double tie_tolerance = 1e-12;
    PropagationOptions propagation{};
    unsigned threads = 0;
};

struct PointerScanResult {
    std::vector<double> theta;
    std::vector<double> phi;
    std::vector<double> score;
    double theta_p = 0.0;
    double phi_p = 0.0;
    std::size_t index_p = 0;
    double horizon = 0.0;
    EntropyMeasure measure = EntropyMeasure::time_average;
    /// Worst conservation defects over every scanned trajectory.
    double max_negativity = 0.0;
    double max_trace_defect = 0.0;
    double max_hermiticity_defect = 0.0;
    double max_entropy = 0.0;
};

/// theta_k = pi k / (n - 1)
inline std::vector<double> theta_grid(std::size_t n) {
    if (n < 2) return {0.0};
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1);
    g.back() = std::numbers::pi;  // exact end point, independent of rounding
    return g;
}

/// Entropy score of one trajectory over [0, horizon] (trapezoid rule for the average).
inline double entropy_score(std::span<const double> times, std::span<const double> entropy, double horizon,
                            EntropyMeasure m) {
    double best = 0.0, integral = 0.0, last = entropy.front();
    std::size_t last_i = 0;
    for (std::size_t i = 0; i < times.size() && times[i] <= horizon * (1.0 + 1e-12); ++i) {
        best = std::max(best, entropy[i]);
        if (i > 0) integral += 0.5 * (times[i] - times[i - 1]) * (entropy[i] + entropy[i - 1]);
        last = entropy[i];
        last_i = i;
    }
    switch (m) {
        case EntropyMeasure::maximum: return best;
        case EntropyMeasure::final: return last;
        default: {
            const double span = times[last_i] - times.front();
            return span > 0.0 ? integral / span : last;
        }
    }
}

/// Propagates every (theta, phi) initial state with one shared kernel table
/// and returns the argmin of the entropy score. `phis` defaults to {0}.
inline PointerScanResult pointer_scan(const KernelTable& kernels, const ChiralQubitParams& params,
                                      std::span<const double> thetas, std::span<const double> times,
                                      const PointerScanOptions& opt = {}, std::span<const double> phis = {}) {
    if (thetas.empty()) throw ConfigError("pointer scan needs a non-empty theta grid");
    if (!(opt.horizon > 0.0) || opt.horizon > times.back() * (1.0 + 1e-12))
        throw ConfigError("pointer-scan horizon must lie inside the time grid");
    const std::vector<double> phi_default{0.0};
    if (phis.empty()) phis = phi_default;

    PointerScanResult r;
    r.horizon = opt.horizon;
    r.measure = opt.measure;
    for (double ph : phis)
        for (double th : thetas) {
            r.theta.push_back(th);
            r.phi.push_back(ph);
        }
    r.score.assign(r.theta.size(), 0.0);
    std::vector<std::array<double, 4>> defects(r.theta.size());
    parallel_for(
        r.theta.size(),
        [&](std::size_t i) {
            const auto traj = propagate(bloch_to_state({r.theta[i], r.phi[i]}), kernels, params, times, opt.propagation);
            r.score[i] = entropy_score(traj.times, traj.entropy, opt.horizon, opt.measure);
            defects[i] = {traj.max_negativity, traj.max_trace_defect, traj.max_hermiticity_defect,
                          *std::max_element(traj.entropy.begin(), traj.entropy.end())};
        },
        opt.threads);
    for (const auto& d : defects) {
        r.max_negativity = std::max(r.max_negativity, d[0]);
        r.max_trace_defect = std::max(r.max_trace_defect, d[1]);
        r.max_hermiticity_defect = std::max(r.max_hermiticity_defect, d[2]);
        r.max_entropy = std::max(r.max_entropy, d[3]);
    }

    double best = std::numeric_limits<double>::infinity();
    for (double s : r.score) best = std::min(best, s);
    // Deterministic tie-break: smallest theta, then smallest phi.
    std::size_t pick = r.score.size();
    for (std::size_t i = 0; i < r.score.size(); ++i) {
        if (r.score[i] > best + opt.tie_tolerance) continue;
        if (pick == r.score.size() || r.theta[i] < r.theta[pick] ||
            (r.theta[i] == r.theta[pick] && r.phi[i] < r.phi[pick]))
            pick = i;
    }
    r.index_p = pick;
    r.theta_p = r.theta[pick];
    r.phi_p = r.phi[pick];
    return r;
}

inline PointerScanResult pointer_scan(const BathConfig& bath, const ChiralQubitParams& params,
                                      std::span<const double> thetas, std::span<const double> times,
                                      const PointerScanOptions& opt = {}, std::span<const double> phis = {}) {
    KernelTable table = compute_kernels(bath, params, times);
    decay_rates(table, dressed_interaction_coefficients(params));
    return pointer_scan(table, params, thetas, times, opt, phis);
}

}  // namespace chiral
