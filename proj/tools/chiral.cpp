#include <algorithm>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chiral/errors.hpp"
#include "chiral/io/config.hpp"
#include "chiral/io/scenario.hpp"
#include "chiral/version.hpp"

namespace {

enum Exit { ok = 0, other = 1, config = 2, quadrature = 3, integrator = 4, numerical = 5 };

bool is_scenario_id(const std::string& s) {
    const auto& ids = chiral::io::scenario_ids();
    return std::find(ids.begin(), ids.end(), s) != ids.end();
}

chiral::io::ScenarioConfig resolve(const std::string& target, const std::vector<std::string>& sets) {
    if (is_scenario_id(target)) return chiral::io::parse_config("scenario = " + target, "<" + target + ">", sets);
    return chiral::io::load_config(target, sets);
}

// Maps the library's error classes onto process exit codes.
int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const chiral::ConfigError& e) {
        std::cerr << "config error:\n" << e.what() << "\n";
        return config;
    } catch (const chiral::QuadratureFailure& e) {
        std::cerr << "quadrature failure: " << e.what() << "\n";
        return quadrature;
    } catch (const chiral::IntegratorFailure& e) {
        std::cerr << "integrator failure: " << e.what() << "\n";
        return integrator;
    } catch (const chiral::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return other;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoherence of a driven chirality qubit: figure scenarios as CSV"};
    app.set_version_flag("--version", std::string(chiral::version));
    app.require_subcommand(1);

    std::string target, out_dir;
    std::vector<std::string> sets;
    bool svg = false;
    int threads = -1;
    auto* run = app.add_subcommand("run", "run a scenario id or a config file");
    run->add_option("target", target, "scenario id (see list-scenarios) or config path")->required();
    run->add_option("--set", sets, "override a config key, e.g. --set ratio=0.4,0.9");
    run->add_option("-o,--out", out_dir, "output directory (default: output_dir from the config)");
    run->add_flag("--svg", svg, "also write SVG line plots");
    run->add_option("-j,--threads", threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);

    std::string config_path;
    std::vector<std::string> vsets;
    auto* validate = app.add_subcommand("validate", "check a config file and print it fully resolved");
    validate->add_option("config", config_path, "config path or scenario id")->required();
    validate->add_option("--set", vsets, "override a config key");

    auto* list = app.add_subcommand("list-scenarios", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& id : chiral::io::scenario_ids())
            std::cout << id << "\t" << chiral::io::scenario_summary(id) << "\n";
        return ok;
    }
    if (validate->parsed()) {
        return guarded([&] {
            const auto c = resolve(config_path, vsets);
            std::cout << chiral::io::config_text(c);
            for (const auto& p : chiral::io::resolve_points(c, 1))
                std::cout << "# point " << chiral::io::point_json(p).dump() << "\n";
            return int(ok);
        });
    }
    return guarded([&] {
        auto c = resolve(target, sets);
        if (svg) c.svg = true;
        if (threads >= 0) c.threads = threads;
        if (!out_dir.empty()) c.output_dir = out_dir;
        const auto result = chiral::io::run_scenario(c);
        chiral::io::write_result(result, c, c.output_dir);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "wrote " << result.files.size() << " files + manifest.json to " << c.output_dir << "\n";
        return int(ok);
    });
}
