#pragma once

// Runs a resolved scenario and collects every output file in memory together
// with a manifest. Nothing here depends on wall-clock time or thread count, so
// identical configs give identical bytes.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "chiral/dynamics.hpp"
#include "chiral/effective.hpp"
#include "chiral/kernels.hpp"
#include "chiral/microscopic.hpp"
#include "chiral/observables.hpp"
#include "chiral/parallel.hpp"
#include "chiral/version.hpp"
#include "chiral/io/checksum.hpp"
#include "chiral/io/config.hpp"
#include "chiral/io/csv.hpp"
#include "chiral/io/svg.hpp"

namespace chiral::io {

using json = nlohmann::ordered_json;

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    std::vector<OutputFile> files;
    json manifest;
    std::vector<std::string> warnings;
};

/// One (ratio, detuning, temperature) combination with everything derived from it.
struct ScenarioPoint {
    double ratio = 0.0;
    double detuning = 0.0;
    double temperature_ratio = 0.0;
    ChiralQubitParams params;
    BathConfig bath;
};

inline SpectralDensity make_spectral(const ScenarioConfig& c) {
    if (c.spectral == "cavity") return cavity_from_coupling(c.cavity_g * c.omega0, c.cavity_gamma, c.omega0);
    if (c.spectral == "ohmic") return Ohmic{c.ohmic_gamma, c.ohmic_cutoff};
    return Lorentzian{c.alpha, 1.0, c.omega0};
}

inline std::vector<ScenarioPoint> resolve_points(const ScenarioConfig& c, unsigned inner_threads) {
    std::vector<ScenarioPoint> pts;
    const bool fixed_drive = !std::isnan(c.drive_omega);
    const std::vector<double> detunings = fixed_drive ? std::vector<double>{c.omega0 - c.drive_omega} : c.detuning;
    for (double r : c.ratio)
        for (double det : detunings)
            for (double t : c.temperature) {
                ScenarioPoint p;
                p.ratio = r;
                p.detuning = det;
                p.temperature_ratio = t;
                const double omega = fixed_drive ? c.drive_omega : c.omega0 - det;
                p.params = params_from_ratio(c.omega_s, r, omega, c.dipole);
                p.bath.spectral = make_spectral(c);
                p.bath.temperature = c.temperature_scale == "omega_so" ? t * p.params.omega_so : t;
                p.bath.quadrature.window_k = c.window_k;
                p.bath.quadrature.options = {c.quad_abs_tol, c.quad_rel_tol,
                                             static_cast<std::size_t>(c.quad_max_intervals)};
                p.bath.threads = inner_threads;
                pts.push_back(p);
            }
    return pts;
}

inline PropagationOptions propagation_options(const ScenarioConfig& c) {
    PropagationOptions o;
    o.include_nonsecular = c.nonsecular;
    o.abs_tol = c.ode_abs_tol;
    o.rel_tol = c.ode_rel_tol;
    o.max_step = c.ode_max_step;
    o.positivity_tolerance = c.positivity_tolerance;
    return o;
}

inline json config_json(const ScenarioConfig& c) {
    json j;
    j["scenario"] = c.scenario;
    j["base_unit"] = c.base_unit;
    j["spectral"] = c.spectral;
    j["omega_s"] = c.omega_s;
    j["ratio"] = c.ratio;
    j["detuning"] = c.detuning;
    j["drive_omega"] = std::isnan(c.drive_omega) ? json(nullptr) : json(c.drive_omega);
    j["dipole"] = c.dipole;
    j["temperature"] = c.temperature;
    j["temperature_scale"] = c.temperature_scale;
    j["alpha"] = c.alpha;
    j["omega0"] = c.omega0;
    j["cavity_g"] = c.cavity_g;
    j["cavity_gamma"] = c.cavity_gamma;
    j["ohmic_gamma"] = c.ohmic_gamma;
    j["ohmic_cutoff"] = c.ohmic_cutoff;
    j["t_max"] = c.t_max;
    j["time_points"] = c.time_points;
    j["theta_points"] = c.theta_points;
    j["phi_points"] = c.phi_points;
    j["horizon"] = c.horizon;
    j["measure"] = c.measure;
    j["display_theta"] = c.display_theta;
    j["nonsecular"] = c.nonsecular;
    j["window_k"] = c.window_k;
    j["quad_rel_tol"] = c.quad_rel_tol;
    j["quad_abs_tol"] = c.quad_abs_tol;
    j["quad_max_intervals"] = c.quad_max_intervals;
    j["ode_abs_tol"] = c.ode_abs_tol;
    j["ode_rel_tol"] = c.ode_rel_tol;
    j["ode_max_step"] = c.ode_max_step;
    j["positivity_tolerance"] = c.positivity_tolerance;
    j["exchange"] = c.exchange;
    j["d_over_j"] = c.d_over_j;
    j["threads"] = c.threads;
    j["output_dir"] = c.output_dir;
    j["svg"] = c.svg;
    return j;
}

/// Resolved config as key = value text, loadable again by parse_config.
inline std::string config_text(const ScenarioConfig& c) {
    std::string out;
    const json j = config_json(c);
    for (const auto& [k, v] : j.items()) {
        if (v.is_null() || (k == "detuning" && !j["drive_omega"].is_null())) continue;
        std::string s;
        if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + shortest(v[i].get<double>());
        } else if (v.is_number_float()) {
            s = shortest(v.get<double>());
        } else if (v.is_string()) {
            s = v.get<std::string>();
        } else {
            s = v.dump();
        }
        out += k + " = " + s + "\n";
    }
    return out;
}

inline json point_json(const ScenarioPoint& p) {
    const auto& q = p.params;
    json j;
    j["ratio"] = p.ratio;
    j["detuning"] = p.detuning;
    j["temperature_ratio"] = p.temperature_ratio;
    j["temperature"] = p.bath.temperature;
    j["omega"] = q.omega;
    j["omega_so"] = q.omega_so;
    j["delta_so"] = q.delta_so;
    j["omega_s"] = q.omega_s;
    j["drive_d_eps"] = q.drive();
    j["delta_plus"] = q.delta_plus;
    j["delta_minus"] = q.delta_minus;
    j["delta_zero"] = q.delta_zero;
    j["spectral"] = spectral_name(p.bath.spectral);
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Lorentzian>) {
                j["alpha"] = s.alpha, j["lambda"] = s.lambda, j["omega0"] = s.omega0;
            } else if constexpr (std::is_same_v<S, Ohmic>) {
                j["gamma_rate"] = s.gamma_rate, j["omega_c"] = s.omega_c;
            } else {
                j["alpha"] = s.alpha, j["omega0"] = s.omega0, j["gamma_rate"] = s.gamma_rate;
            }
        },
        p.bath.spectral);
    return j;
}

inline std::string point_tag(const ScenarioPoint& p) {
    return "r" + label(p.ratio) + "_d" + label(p.detuning) + "_T" + label(p.temperature_ratio);
}

inline Csv trajectory_csv(const Trajectory& tr) {
    Csv csv({"t", "P", "E", "re_rho00", "re_rho11", "re_rho01", "im_rho01", "gamma_z", "gamma_plus", "gamma_minus"});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const auto& r = tr.states[i];
        const auto& g = tr.rates[i];
        csv.row({tr.times[i], tr.polarization[i], tr.entropy[i], r(0, 0).real(), r(1, 1).real(), r(0, 1).real(),
                 r(0, 1).imag(), g.z, g.plus, g.minus});
    }
    return csv;
}

inline Csv kernel_csv(const KernelTable& k) {
    Csv csv({"t", "re_gamma_0", "im_gamma_0", "re_gamma_plus", "im_gamma_plus", "re_gamma_minus", "im_gamma_minus",
             "re_gammap_0", "im_gammap_0", "re_gammap_plus", "im_gammap_plus", "re_gammap_minus", "im_gammap_minus",
             "gamma_z", "gamma_plus", "gamma_minus"});
    for (std::size_t i = 0; i < k.size(); ++i) {
        std::vector<double> row{k.times[i]};
        for (int l = 0; l < 3; ++l) row.push_back(k.gamma[l][i].real()), row.push_back(k.gamma[l][i].imag());
        for (int l = 0; l < 3; ++l)
            row.push_back(k.gamma_prime[l][i].real()), row.push_back(k.gamma_prime[l][i].imag());
        row.push_back(k.rate_z[i]);
        row.push_back(k.rate_plus[i]);
        row.push_back(k.rate_minus[i]);
        csv.row(row);
    }
    return csv;
}

namespace detail {

struct PointOutcome {
    json info;
    std::vector<OutputFile> files;
    std::vector<std::string> warnings;
    std::vector<Series> plot;
    double theta_p = 0.0;
    double score_p = 0.0;
};

inline json kernel_json(const KernelTable& k) {
    return {{"evaluations", k.evaluations}, {"max_error", k.max_error}, {"nodes", k.size()}};
}

/// Worst-case conservation numbers over every trajectory of one point.
struct Conservation {
    double negativity = 0.0;
    double trace = 0.0;
    double hermiticity = 0.0;
    double max_entropy = 0.0;
    std::size_t trajectories = 0;

    void add(double neg, double tr, double herm, double entropy, std::size_t n = 1) {
        negativity = std::max(negativity, neg);
        trace = std::max(trace, tr);
        hermiticity = std::max(hermiticity, herm);
        max_entropy = std::max(max_entropy, entropy);
        trajectories += n;
    }
    void add(const Trajectory& t) {
        add(t.max_negativity, t.max_trace_defect, t.max_hermiticity_defect,
            *std::max_element(t.entropy.begin(), t.entropy.end()));
    }
};

inline DensityMatrix2 initial_up() {
    DensityMatrix2 r = DensityMatrix2::Zero();
    r(0, 0) = 1.0;
    return r;
}

inline KernelTable kernels_with_rates(const ScenarioPoint& p, const std::vector<double>& times) {
    KernelTable k = compute_kernels(p.bath, p.params, times);
    decay_rates(k, dressed_interaction_coefficients(p.params));
    return k;
}

inline PointOutcome run_point(const ScenarioConfig& c, const ScenarioPoint& p, const std::vector<double>& times,
                              unsigned inner_threads) {
    PointOutcome out;
    out.info = point_json(p);
    const std::string tag = point_tag(p);
    const KernelTable k = kernels_with_rates(p, times);
    out.info["kernels"] = kernel_json(k);
    const auto opt = propagation_options(c);
    Conservation cons;

    const std::string& s = c.scenario;
    if (s == "fig3" || s == "custom") {
        out.files.push_back({"kernels_" + tag + ".csv", kernel_csv(k).str()});
        out.plot.push_back({"gamma+ " + tag, k.times, k.rate_plus});
        out.plot.push_back({"gamma- " + tag, k.times, k.rate_minus});
    }
    if (s == "fig2" || s == "fig4" || s == "custom") {
        const auto tr = propagate(initial_up(), k, p.params, times, opt);
        cons.add(tr);
        out.files.push_back({"trajectory_" + tag + ".csv", trajectory_csv(tr).str()});
        if (s != "custom") out.plot.clear();
        out.plot.push_back({"P " + tag, tr.times, tr.polarization});
    }
    if (s == "fig5a" || s == "fig5b" || s == "fig6") {
        PointerScanOptions so;
        so.measure = parse_measure(c.measure);
        so.horizon = c.horizon;
        so.propagation = opt;
        so.threads = inner_threads;
        const auto thetas = theta_grid(static_cast<std::size_t>(c.theta_points));
        std::vector<double> phis;
        for (int i = 0; i < c.phi_points; ++i) phis.push_back(2.0 * std::numbers::pi * i / c.phi_points);
        const auto scan = pointer_scan(k, p.params, thetas, times, so, phis);
        cons.add(scan.max_negativity, scan.max_trace_defect, scan.max_hermiticity_defect, scan.max_entropy,
                 scan.score.size());
        Csv csv = c.phi_points > 1 ? Csv({"theta", "phi", "score"}) : Csv({"theta", "score"});
        for (std::size_t i = 0; i < scan.theta.size(); ++i) {
            if (c.phi_points > 1) csv.row({scan.theta[i], scan.phi[i], scan.score[i]});
            else csv.row({scan.theta[i], scan.score[i]});
        }
        csv.comment("theta_p=" + fmt(scan.theta_p) + " phi_p=" + fmt(scan.phi_p) + " horizon=" + fmt(scan.horizon) +
                    " measure=" + measure_name(scan.measure));
        out.files.push_back({"scan_" + tag + ".csv", csv.str()});
        out.theta_p = scan.theta_p;
        out.score_p = scan.score[scan.index_p];
        out.info["pointer"] = {{"theta_p", scan.theta_p}, {"phi_p", scan.phi_p}, {"score", out.score_p}};

        if (s != "fig6") {
            for (double th : c.display_theta) {
                const auto tr = propagate(bloch_to_state({th * std::numbers::pi, 0.0}), k, p.params, times, opt);
                cons.add(tr);
                out.files.push_back({"trajectory_" + tag + "_theta" + label(th) + ".csv", trajectory_csv(tr).str()});
                out.plot.push_back({"E theta=" + label(th) + "pi " + tag, tr.times, tr.entropy});
            }
        }
    }
    out.info["conservation"] = {{"trajectories", cons.trajectories},
                                {"max_negativity", cons.negativity},
                                {"positivity_violated", cons.negativity > c.positivity_tolerance},
                                {"max_trace_defect", cons.trace},
                                {"max_hermiticity_defect", cons.hermiticity},
                                {"max_entropy", cons.max_entropy}};
    if (cons.negativity > c.positivity_tolerance)
        out.warnings.push_back(tag + ": eigenvalue " + fmt(-cons.negativity) + " below the positivity tolerance " +
                               fmt(c.positivity_tolerance));
    return out;
}

inline RunResult run_fig1(const ScenarioConfig& c) {
    RunResult r;
    const auto tp = microscopic::TrimerParams::isotropic(c.exchange, c.d_over_j * c.exchange);
    const auto spec = microscopic::trimer_spectrum(tp);
    const auto eff = microscopic::derive_effective(tp);
    Csv csv({"index", "energy"});
    std::vector<double> idx, en;
    for (int i = 0; i < 8; ++i) {
        csv.row({static_cast<double>(i), spec.eigenvalues(i)});
        idx.push_back(i);
        en.push_back(spec.eigenvalues(i));
    }
    r.files.push_back({"spectrum.csv", csv.str()});
    if (c.svg) r.files.push_back({"spectrum.svg", svg_plot("trimer levels", "index", "energy / J", {{"E", idx, en}})});
    r.manifest["derived"] = {{"omega_so", eff.omega_so},
                             {"omega_so_gap", spec.omega_so},
                             {"projection_off_diagonal", eff.off_diagonal},
                             {"chirality_degenerate", eff.degenerate}};
    return r;
}

}  // namespace detail

/// Executes the scenario. Points run in parallel; outputs are assembled in
/// point order afterwards.
inline RunResult run_scenario(const ScenarioConfig& c) {
    RunResult r;
    if (c.scenario == "fig1") {
        r = detail::run_fig1(c);
    } else {
        const unsigned threads = resolve_threads(static_cast<unsigned>(c.threads));
        const auto probe = resolve_points(c, 1);
        const unsigned inner = probe.size() > 1 ? 1u : threads;
        const auto points = resolve_points(c, inner);
        const auto times = uniform_grid(c.t_max, static_cast<std::size_t>(c.time_points));
        std::vector<detail::PointOutcome> outcomes(points.size());
        parallel_for(
            points.size(), [&](std::size_t i) { outcomes[i] = detail::run_point(c, points[i], times, inner); },
            points.size() > 1 ? threads : 1u);

        json pts = json::array();
        std::vector<Series> plot;
        Csv pointer({"ratio", "detuning", "temperature", "theta_p", "score"});
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto& o = outcomes[i];
            json files = json::array();
            for (auto& f : o.files) {
                files.push_back(f.name);
                r.files.push_back(std::move(f));
            }
            o.info["files"] = files;
            pts.push_back(o.info);
            r.warnings.insert(r.warnings.end(), o.warnings.begin(), o.warnings.end());
            plot.insert(plot.end(), o.plot.begin(), o.plot.end());
            pointer.row({points[i].ratio, points[i].detuning, points[i].temperature_ratio, o.theta_p, o.score_p});

            const auto& pp = points[i].params;
            if (const auto* l = std::get_if<Lorentzian>(&points[i].bath.spectral); l && l->alpha * l->alpha > 0.1 * pp.omega_s)
                r.warnings.push_back(point_tag(points[i]) + ": alpha^2 is not small against omega_s");
            if (c.t_max / (c.time_points - 1) * pp.omega_s > 1.0)
                r.warnings.push_back(point_tag(points[i]) + ": time step does not resolve the omega_s oscillation of the kernels");
            if (points[i].bath.temperature >= pp.omega_so && pp.omega_so > 0.0)
                r.warnings.push_back(point_tag(points[i]) + ": temperature is not below omega_so");
        }
        if (c.scenario == "fig6") {
            r.files.push_back({"pointer.csv", pointer.str()});
            std::vector<double> x, y;
            for (std::size_t i = 0; i < points.size(); ++i) x.push_back(points[i].detuning), y.push_back(outcomes[i].theta_p);
            plot = {{"theta_p", x, y}};
        }
        if (c.svg) {
            const bool scan = c.scenario == "fig6";
            r.files.push_back({c.scenario + ".svg",
                               svg_plot(c.scenario + ": " + scenario_summary(c.scenario),
                                        scan ? "(omega0 - omega)" : "t", scan ? "theta_p" : "value", plot)});
        }
        r.manifest["points"] = pts;
    }

    json m;
    m["tool"] = "chiral";
    m["version"] = version;
    m["scenario"] = c.scenario;
    m["summary"] = scenario_summary(c.scenario);
    m["config"] = config_json(c);
    for (auto& [k, v] : r.manifest.items()) m[k] = v;
    json files = json::array();
    for (const auto& f : r.files)
        files.push_back({{"name", f.name}, {"bytes", f.content.size()}, {"sha256", sha256_hex(f.content)}});
    m["files"] = files;
    m["warnings"] = r.warnings;
    r.manifest = m;
    return r;
}

/// Writes every output plus manifest.json and the resolved config into `dir`.
inline void write_result(const RunResult& r, const ScenarioConfig& c, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        out << content;
    };
    for (const auto& f : r.files) put(f.name, f.content);
    put("resolved.conf", config_text(c));
    put("manifest.json", r.manifest.dump(2) + "\n");
}

}  // namespace chiral::io
