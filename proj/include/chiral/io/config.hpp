#pragma once

// Scenario configuration: a key = value text format, one key per line, '#'
// starts a comment. Lists are comma separated. Every scenario starts from its
// own defaults; file keys and then command-line overrides are applied on top.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chiral/errors.hpp"

namespace chiral::io {

struct ScenarioConfig {
    std::string scenario = "custom";
    /// "lambda" (Lorentzian width = 1) or "omega0" (mode frequency = 1).
    std::string base_unit = "lambda";
    std::string spectral = "lorentzian";

    // effective qubit
    double omega_s = 100.0;
    std::vector<double> ratio{0.4};
    /// (omega0 - omega) in base units; ignored when drive_omega is set.
    std::vector<double> detuning{0.1};
    /// Absolute drive frequency; NaN means "derive from detuning".
    double drive_omega = std::nan("");
    double dipole = 1.0;

    // bath
    std::vector<double> temperature{0.0};
    /// "omega_so": T = value * omega_so; "absolute": T = value.
    std::string temperature_scale = "omega_so";
    double alpha = 1.0;
    double omega0 = 1000.0;
    double cavity_g = 0.01;
    double cavity_gamma = 0.1;
    double ohmic_gamma = 0.01;
    double ohmic_cutoff = 1.0;

    // grids
    double t_max = 2.0;
    int time_points = 401;
    int theta_points = 61;
    int phi_points = 1;
    double horizon = 2.0;
    std::string measure = "time_average";
    /// theta / pi values whose full trajectories are written by scan scenarios.
    std::vector<double> display_theta{0.0, 0.25, 0.5, 0.75, 1.0};

    // numerics
    bool nonsecular = false;
    double window_k = 50.0;
    double quad_rel_tol = 1e-11;
    double quad_abs_tol = 1e-15;
    int quad_max_intervals = 20000;
    double ode_abs_tol = 1e-10;
    double ode_rel_tol = 1e-10;
    double ode_max_step = 0.0;
    double positivity_tolerance = 1e-6;

    // microscopic
    double exchange = 1.0;
    double d_over_j = 0.1;

    // run
    int threads = 0;
    std::string output_dir;
    bool svg = false;
};

struct Diagnostic {
    /// 1-based line in the source, 0 when not tied to a line.
    int line = 0;
    std::string source;
    std::string message;

    std::string str() const {
        std::ostringstream os;
        os << source;
        if (line > 0) os << ":" << line;
        os << ": " << message;
        return os.str();
    }
};

/// Aggregated validation failure. what() lists every diagnostic.
struct ConfigErrors : ConfigError {
    std::vector<Diagnostic> items;

    explicit ConfigErrors(std::vector<Diagnostic> d) : ConfigError(join(d)), items(std::move(d)) {}

    static std::string join(const std::vector<Diagnostic>& d) {
        std::string s;
        for (const auto& x : d) s += (s.empty() ? "" : "\n") + x.str();
        return s;
    }
};

inline const std::vector<std::string>& scenario_ids() {
    static const std::vector<std::string> ids{"fig1", "fig2", "fig3", "fig4", "fig5a", "fig5b", "fig6", "custom"};
    return ids;
}

inline std::string scenario_summary(const std::string& id) {
    static const std::map<std::string, std::string> d{
        {"fig1", "trimer level scheme at D/J = 0.1"},
        {"fig2", "polarization P(t) for a sweep of Delta_so/omega_s (Lorentzian, T = 1)"},
        {"fig3", "decay rates gamma_+-(t) for two detunings and T in {0, 1}"},
        {"fig4", "polarization with the cavity-filtered bath (gamma = 0.1, g = 0.01 omega0)"},
        {"fig5a", "entropy and pointer scan at T = 0 (Delta_so/omega_s = 0.9)"},
        {"fig5b", "entropy and pointer scan at T = 1 (Delta_so/omega_s = 0.9)"},
        {"fig6", "pointer angle theta_p against detuning at T = 1"},
        {"custom", "single configurable run: trajectories and kernels"}};
    return d.at(id);
}

inline ScenarioConfig scenario_defaults(const std::string& id) {
    ScenarioConfig c;
    c.scenario = id;
    if (id == "fig1") {
        c.exchange = 1.0;
        c.d_over_j = 0.1;
    } else if (id == "fig2") {
        // 0.4 and 0.9 are caption values; 0.1 and 0.7 fill in the sweep.
        c.ratio = {0.1, 0.4, 0.7, 0.9};
        c.detuning = {0.1};
        c.temperature = {1.0};
    } else if (id == "fig3") {
        c.ratio = {0.4};
        c.detuning = {0.1, 10.0};
        c.temperature = {0.0, 1.0};
    } else if (id == "fig4") {
        c.base_unit = "omega0";
        c.spectral = "cavity";
        c.omega0 = 1.0;
        c.cavity_g = 0.01;
        c.cavity_gamma = 0.1;
        c.drive_omega = 0.9;
        c.ratio = {0.4};
        c.temperature = {1.0};
        c.t_max = 10.0;
        c.time_points = 2001;
        c.horizon = 10.0;
    } else if (id == "fig5a" || id == "fig5b") {
        c.ratio = {0.9};
        c.detuning = {0.1, 10.0};
        c.temperature = {id == "fig5a" ? 0.0 : 1.0};
    } else if (id == "fig6") {
        c.ratio = {0.9};
        c.detuning = {0.1, 0.3, 1.0, 3.0, 10.0, 30.0};
        c.temperature = {1.0};
    } else if (id != "custom") {
        throw ConfigError("unknown scenario '" + id + "'");
    }
    c.output_dir = "out/" + id;
    return c;
}

namespace detail {

inline std::string trim(std::string s) {
    auto ws = [](unsigned char ch) { return std::isspace(ch) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

inline bool parse_double(const std::string& raw, double& out) {
    const std::string s = trim(raw);
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_int(const std::string& raw, int& out) {
    const std::string s = trim(raw);
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

inline bool parse_list(const std::string& raw, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_double(item, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

inline bool parse_bool(const std::string& raw, bool& out) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return out = true, true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return out = false, true;
    return false;
}

/// Setter for one key: returns an error message or "".
using Setter = std::function<std::string(ScenarioConfig&, const std::string&)>;

inline Setter number(double ScenarioConfig::*m) {
    return [m](ScenarioConfig& c, const std::string& v) -> std::string {
        return parse_double(v, c.*m) ? "" : "expected a finite number, got '" + trim(v) + "'";
    };
}
inline Setter integer(int ScenarioConfig::*m) {
    return [m](ScenarioConfig& c, const std::string& v) -> std::string {
        return parse_int(v, c.*m) ? "" : "expected an integer, got '" + trim(v) + "'";
    };
}
inline Setter list(std::vector<double> ScenarioConfig::*m) {
    return [m](ScenarioConfig& c, const std::string& v) -> std::string {
        return parse_list(v, c.*m) ? "" : "expected a comma-separated list of numbers, got '" + trim(v) + "'";
    };
}
inline Setter flag(bool ScenarioConfig::*m) {
    return [m](ScenarioConfig& c, const std::string& v) -> std::string {
        return parse_bool(v, c.*m) ? "" : "expected true or false, got '" + trim(v) + "'";
    };
}
inline Setter choice(std::string ScenarioConfig::*m, std::vector<std::string> allowed) {
    return [m, allowed](ScenarioConfig& c, const std::string& raw) -> std::string {
        const std::string v = trim(raw);
        if (allowed.empty() || std::find(allowed.begin(), allowed.end(), v) != allowed.end()) {
            c.*m = v;
            return "";
        }
        std::string msg = "'" + v + "' is not one of:";
        for (const auto& a : allowed) msg += " " + a;
        return msg;
    };
}

inline const std::map<std::string, Setter>& setters() {
    using C = ScenarioConfig;
    static const std::map<std::string, Setter> s{
        {"base_unit", choice(&C::base_unit, {"lambda", "omega0"})},
        {"spectral", choice(&C::spectral, {"lorentzian", "ohmic", "cavity"})},
        {"omega_s", number(&C::omega_s)},
        {"ratio", list(&C::ratio)},
        {"detuning", list(&C::detuning)},
        {"drive_omega", number(&C::drive_omega)},
        {"dipole", number(&C::dipole)},
        {"temperature", list(&C::temperature)},
        {"temperature_scale", choice(&C::temperature_scale, {"omega_so", "absolute"})},
        {"alpha", number(&C::alpha)},
        {"omega0", number(&C::omega0)},
        {"cavity_g", number(&C::cavity_g)},
        {"cavity_gamma", number(&C::cavity_gamma)},
        {"ohmic_gamma", number(&C::ohmic_gamma)},
        {"ohmic_cutoff", number(&C::ohmic_cutoff)},
        {"t_max", number(&C::t_max)},
        {"time_points", integer(&C::time_points)},
        {"theta_points", integer(&C::theta_points)},
        {"phi_points", integer(&C::phi_points)},
        {"horizon", number(&C::horizon)},
        {"measure", choice(&C::measure, {"time_average", "max", "final"})},
        {"display_theta", list(&C::display_theta)},
        {"nonsecular", flag(&C::nonsecular)},
        {"window_k", number(&C::window_k)},
        {"quad_rel_tol", number(&C::quad_rel_tol)},
        {"quad_abs_tol", number(&C::quad_abs_tol)},
        {"quad_max_intervals", integer(&C::quad_max_intervals)},
        {"ode_abs_tol", number(&C::ode_abs_tol)},
        {"ode_rel_tol", number(&C::ode_rel_tol)},
        {"ode_max_step", number(&C::ode_max_step)},
        {"positivity_tolerance", number(&C::positivity_tolerance)},
        {"exchange", number(&C::exchange)},
        {"d_over_j", number(&C::d_over_j)},
        {"threads", integer(&C::threads)},
        {"output_dir", choice(&C::output_dir, {})},
        {"svg", flag(&C::svg)},
    };
    return s;
}

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
    std::string source;
};

inline std::vector<Entry> split_lines(const std::string& text, const std::string& source,
                                      std::vector<Diagnostic>& diags) {
    std::vector<Entry> out;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            diags.push_back({n, source, "expected 'key = value'"});
            continue;
        }
        out.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), n, source});
    }
    return out;
}

}  // namespace detail

/// Cross-field checks on a fully assembled config.
inline std::vector<Diagnostic> check_config(const ScenarioConfig& c, const std::map<std::string, int>& lines,
                                            const std::string& source) {
    std::vector<Diagnostic> d;
    auto line_of = [&](const std::string& k) {
        auto it = lines.find(k);
        return it == lines.end() ? 0 : it->second;
    };
    auto fail = [&](const std::string& key, const std::string& msg) { d.push_back({line_of(key), source, msg}); };

    if (c.base_unit == "lambda" && c.spectral != "lorentzian")
        fail("base_unit", "base unit lambda requires the Lorentzian bath (spectral = " + c.spectral + ")");
    if (c.base_unit == "omega0" && c.spectral == "lorentzian")
        fail("base_unit", "base unit omega0 conflicts with a Lorentzian bath measured in lambda");
    if (c.base_unit == "omega0" && c.spectral == "cavity" && c.omega0 != 1.0)
        fail("omega0", "omega0 is the base unit here and must equal 1");
    if (!(c.omega_s > 0.0)) fail("omega_s", "omega_s must be positive");
    for (double r : c.ratio)
        if (std::abs(r) > 1.0) fail("ratio", "Delta_so/omega_s values must lie in [-1, 1]");
    for (double t : c.temperature)
        if (t < 0.0) fail("temperature", "temperature must be >= 0");
    if (!(c.dipole > 0.0)) fail("dipole", "dipole strength must be positive");
    if (c.alpha < 0.0) fail("alpha", "alpha must be >= 0");
    if (c.spectral == "cavity" && !(c.cavity_gamma > 0.0)) fail("cavity_gamma", "cavity gamma must be positive");
    if (c.spectral == "cavity" && c.cavity_g < 0.0) fail("cavity_g", "cavity g must be >= 0");
    if (c.spectral == "ohmic" && !(c.ohmic_cutoff > 0.0)) fail("ohmic_cutoff", "Ohmic cutoff must be positive");
    if (c.spectral == "ohmic" && c.ohmic_gamma < 0.0) fail("ohmic_gamma", "Ohmic gamma must be >= 0");
    if (lines.count("detuning") && lines.count("drive_omega"))
        fail("drive_omega", "set either drive_omega or detuning, not both");
    if (std::isnan(c.drive_omega) && c.spectral != "lorentzian")
        fail("drive_omega", "non-Lorentzian baths need an explicit drive_omega");
    if (!(c.t_max > 0.0)) fail("t_max", "t_max must be positive");
    if (c.time_points < 2) fail("time_points", "time_points must be at least 2");
    if (c.theta_points < 1) fail("theta_points", "theta_points must be at least 1");
    if (c.phi_points < 1) fail("phi_points", "phi_points must be at least 1");
    const bool scans = c.scenario == "fig5a" || c.scenario == "fig5b" || c.scenario == "fig6";
    if ((scans || lines.count("horizon")) && (!(c.horizon > 0.0) || c.horizon > c.t_max))
        fail("horizon", "horizon must lie in (0, t_max]");
    if (!(c.window_k > 0.0)) fail("window_k", "window_k must be positive");
    if (!(c.quad_rel_tol > 0.0) || c.quad_abs_tol < 0.0) fail("quad_rel_tol", "quadrature tolerances must be positive");
    if (c.quad_max_intervals < 1) fail("quad_max_intervals", "quad_max_intervals must be positive");
    if (!(c.ode_abs_tol > 0.0) || !(c.ode_rel_tol > 0.0)) fail("ode_rel_tol", "integrator tolerances must be positive");
    if (c.ode_max_step < 0.0) fail("ode_max_step", "ode_max_step must be >= 0");
    if (!(c.positivity_tolerance > 0.0)) fail("positivity_tolerance", "positivity_tolerance must be positive");
    if (c.threads < 0) fail("threads", "threads must be >= 0");
    if (c.output_dir.empty()) fail("output_dir", "output_dir must not be empty");
    return d;
}

/// Parses config text. `overrides` are "key=value" strings applied after the
/// file. Throws ConfigErrors listing every problem with its line.
inline ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>",
                                   const std::vector<std::string>& overrides = {}) {
    std::vector<Diagnostic> diags;
    auto entries = detail::split_lines(text, source, diags);
    for (std::size_t i = 0; i < overrides.size(); ++i) {
        auto more = detail::split_lines(overrides[i], "--set #" + std::to_string(i + 1), diags);
        entries.insert(entries.end(), more.begin(), more.end());
    }

    std::string scenario = "custom";
    std::set<std::string> seen;
    for (const auto& e : entries) {
        if (e.key != "scenario") continue;
        if (std::find(scenario_ids().begin(), scenario_ids().end(), e.value) == scenario_ids().end())
            diags.push_back({e.line, e.source, "unknown scenario '" + e.value + "'"});
        else
            scenario = e.value;
    }

    ScenarioConfig c = scenario_defaults(scenario);
    std::map<std::string, int> lines;
    for (const auto& e : entries) {
        if (e.key == "scenario") continue;
        const auto& table = detail::setters();
        auto it = table.find(e.key);
        if (it == table.end()) {
            diags.push_back({e.line, e.source, "unknown key '" + e.key + "'"});
            continue;
        }
        if (e.source == source && !seen.insert(e.key).second) {
            diags.push_back({e.line, e.source, "duplicate key '" + e.key + "'"});
            continue;
        }
        if (auto msg = it->second(c, e.value); !msg.empty()) {
            diags.push_back({e.line, e.source, e.key + ": " + msg});
            continue;
        }
        lines[e.key] = e.source == source ? e.line : 0;
    }
    // An explicit detuning replaces a scenario's default drive frequency.
    if (lines.count("detuning") && !lines.count("drive_omega")) c.drive_omega = std::nan("");
    if (!diags.empty()) throw ConfigErrors(std::move(diags));
    if (auto more = check_config(c, lines, source); !more.empty()) throw ConfigErrors(std::move(more));
    return c;
}

inline ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path, overrides);
}

}  // namespace chiral::io
