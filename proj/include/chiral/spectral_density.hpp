#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>

#include "chiral/errors.hpp"

namespace chiral {

/// J(w) = alpha^2 lambda^2 / (2 pi [(w - omega0)^2 + lambda^2])
struct Lorentzian {
    double alpha = 0.0;
    double lambda = 1.0;
    double omega0 = 0.0;
};

/// J(w) = gamma_rate w exp(-w / omega_c), w > 0
struct Ohmic {
    double gamma_rate = 0.0;
    double omega_c = 1.0;
};

/// Cavity-filtered density of the mapped normal-mode model:
/// J(w) = 2 alpha w omega0^4 / [(omega0^2 - w^2)^2 + (2 pi gamma w omega0)^2], w > 0
struct CavityEffective {
    double alpha = 0.0;
    double omega0 = 1.0;
    double gamma_rate = 0.0;
};

using SpectralDensity = std::variant<Lorentzian, Ohmic, CavityEffective>;

/// alpha = 8 gamma g^2 / omega0
inline double effective_alpha(double g, double gamma_rate, double omega0) {
    return 8.0 * gamma_rate * g * g / omega0;
}

inline CavityEffective cavity_from_coupling(double g, double gamma_rate, double omega0) {
    return {effective_alpha(g, gamma_rate, omega0), omega0, gamma_rate};
}

/// Bose occupation 1/(exp(w/T) - 1); exactly zero at T = 0.
inline double mean_occupation(double omega_prime, double temperature) {
    if (!(omega_prime > 0.0)) throw NonPositiveFrequency("Bose occupation needs a positive frequency");
    if (temperature <= 0.0) return 0.0;
    return 1.0 / std::expm1(omega_prime / temperature);
}

inline double spectral_eval(const Lorentzian& s, double w) {
    const double dw = w - s.omega0;
    return s.alpha * s.alpha * s.lambda * s.lambda / (2.0 * std::numbers::pi * (dw * dw + s.lambda * s.lambda));
}

inline double spectral_eval(const Ohmic& s, double w) {
    if (w <= 0.0) return 0.0;
    return s.gamma_rate * w * std::exp(-w / s.omega_c);
}

inline double spectral_eval(const CavityEffective& s, double w) {
    if (w <= 0.0) return 0.0;
    const double w02 = s.omega0 * s.omega0;
    const double detune = w02 - w * w;
    const double damp = 2.0 * std::numbers::pi * s.gamma_rate * w * s.omega0;
    return 2.0 * s.alpha * w * w02 * w02 / (detune * detune + damp * damp);
}

inline double spectral_eval(const SpectralDensity& s, double w) {
    return std::visit([w](const auto& v) { return spectral_eval(v, w); }, s);
}

/// Analytic continuation of J to complex frequency, used for contour-rotated
/// tail integrals. Agrees with spectral_eval on the positive real axis.
inline std::complex<double> spectral_continuation(const Lorentzian& s, std::complex<double> z) {
    const auto dz = z - s.omega0;
    return s.alpha * s.alpha * s.lambda * s.lambda / (2.0 * std::numbers::pi * (dz * dz + s.lambda * s.lambda));
}

inline std::complex<double> spectral_continuation(const Ohmic& s, std::complex<double> z) {
    return s.gamma_rate * z * std::exp(-z / s.omega_c);
}

inline std::complex<double> spectral_continuation(const CavityEffective& s, std::complex<double> z) {
    const double w02 = s.omega0 * s.omega0;
    const auto detune = w02 - z * z;
    const auto damp = 2.0 * std::numbers::pi * s.gamma_rate * z * s.omega0;
    return 2.0 * s.alpha * z * w02 * w02 / (detune * detune + damp * damp);
}

inline std::complex<double> mean_occupation(std::complex<double> z, double temperature) {
    if (temperature <= 0.0) return 0.0;
    return 1.0 / (std::exp(z / temperature) - 1.0);
}

inline std::string spectral_name(const SpectralDensity& s) {
    struct {
        std::string operator()(const Lorentzian&) const { return "lorentzian"; }
        std::string operator()(const Ohmic&) const { return "ohmic"; }
        std::string operator()(const CavityEffective&) const { return "cavity"; }
    } v;
    return std::visit(v, s);
}

/// Centre and width of the region carrying the spectral weight, used to place
/// integration windows.
struct SpectralSupport {
    double center;
    double width;
};

inline SpectralSupport spectral_support(const SpectralDensity& s) {
    struct {
        SpectralSupport operator()(const Lorentzian& l) const { return {l.omega0, l.lambda}; }
        SpectralSupport operator()(const Ohmic& o) const { return {o.omega_c, o.omega_c}; }
        SpectralSupport operator()(const CavityEffective& c) const {
            return {c.omega0, std::max(std::numbers::pi * c.gamma_rate * c.omega0, 1e-3 * c.omega0)};
        }
    } v;
    return std::visit(v, s);
}

inline void validate(const SpectralDensity& s) {
    struct {
        void operator()(const Lorentzian& l) const {
            if (!(l.lambda > 0.0)) throw ConfigError("Lorentzian width lambda must be positive");
            if (!std::isfinite(l.alpha) || !std::isfinite(l.omega0)) throw ConfigError("non-finite Lorentzian parameters");
        }
        void operator()(const Ohmic& o) const {
            if (!(o.omega_c > 0.0)) throw ConfigError("Ohmic cutoff must be positive");
            if (!(o.gamma_rate >= 0.0)) throw ConfigError("Ohmic gamma must be >= 0");
        }
        void operator()(const CavityEffective& c) const {
            if (!(c.omega0 > 0.0)) throw ConfigError("cavity omega0 must be positive");
            if (!(c.gamma_rate > 0.0)) throw ConfigError("cavity gamma must be positive");
            if (!(c.alpha >= 0.0)) throw ConfigError("cavity alpha must be >= 0");
        }
    } v;
    std::visit(v, s);
}

}  // namespace chiral
