// leoiot: command-line front end for the offloading and backhauling experiments.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "leoiot/config_io.hpp"
#include "leoiot/experiments.hpp"
#include "leoiot/parallel.hpp"
#include "leoiot/version.hpp"

namespace fs = std::filesystem;
using namespace leoiot;

namespace {

struct Common {
    std::string preset;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::string out;
    int workers = default_workers();
    std::vector<std::string> overrides;
};

struct Axes {
    std::vector<double> rho;
    std::vector<int> hops;
    std::vector<double> erasures;
    std::vector<std::string> modes;
    std::vector<std::string> figures;
    std::optional<std::size_t> packets;
    bool export_traces = false;
};

void add_common(CLI::App* app, Common& c, const std::string& default_preset)
{
    c.preset = default_preset;
    app->add_option("--preset", c.preset, "offloading or backhauling")->capture_default_str();
    app->add_option("--config", c.config, "INI config file (replaces the preset)")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--replications", c.replications, "independent replications per point")
        ->check(CLI::PositiveNumber);
    app->add_option("--out", c.out, "output directory (default: $LEOIOT_OUT_DIR or ./out)");
    app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--set", c.overrides, "override a config key, e.g. --set traffic.ground_ratio=1");
    app->add_option("overrides", c.overrides, "section.key=value overrides");
}

void add_axes(CLI::App* app, Axes& a, bool sweep)
{
    app->add_option("--figure", a.figures, "figures to produce");
    app->add_option("--export-traces", a.export_traces, "write per-update traces of the first replication");
    if (!sweep)
        return;
    app->add_option("--rho", a.rho, "loads")->delimiter(',');
    app->add_option("--hops", a.hops, "hop counts")->delimiter(',');
    app->add_option("--link-erasure", a.erasures, "per-link erasure probabilities")->delimiter(',');
    app->add_option("--mode", a.modes, "no-ra, ra-a1, ra-a10, ...")->delimiter(',');
    app->add_option("--packets", a.packets, "updates offered per replication")->check(CLI::PositiveNumber);
}

ScenarioConfig load_scenario(const Common& c)
{
    ScenarioConfig sc = c.config.empty() ? preset(c.preset) : load_config(c.config);
    std::vector<std::pair<std::string, std::string>> kv;
    for (const std::string& o : c.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("override '{}' is not key=value", o));
        kv.emplace_back(o.substr(0, eq), o.substr(eq + 1));
    }
    apply_overrides(sc, kv);
    if (c.seed)
        sc.seed = *c.seed;
    if (c.replications)
        sc.replications = *c.replications;
    return sc;
}

fs::path output_dir(const Common& c)
{
    if (!c.out.empty())
        return c.out;
    if (const char* env = std::getenv("LEOIOT_OUT_DIR"); env && *env)
        return env;
    return "out";
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

exp::ExperimentSpec make_spec(const std::string& command, const Common& c, const Axes& a)
{
    const ScenarioConfig sc = load_scenario(c);
    exp::ExperimentSpec spec = command == "offload" ? exp::offloading_spec(sc) : exp::backhauling_spec(sc);
    spec.preset = c.config.empty() ? c.preset : "";
    spec.out_dir = output_dir(c);
    spec.workers = c.workers;
    spec.export_traces = a.export_traces;
    if (a.packets)
        spec.packets = *a.packets;

    const bool custom_axes = !a.rho.empty() || !a.hops.empty() || !a.erasures.empty() || !a.modes.empty();
    if (!a.rho.empty())
        spec.loads = a.rho;
    if (!a.hops.empty())
        spec.hops = a.hops;
    if (!a.erasures.empty())
        spec.erasures = a.erasures;
    if (!a.modes.empty()) {
        spec.modes.clear();
        for (const std::string& m : a.modes)
            spec.modes.push_back(backhaul::parse_mode(m));
    }
    if (!a.figures.empty()) {
        spec.figures.clear();
        for (const std::string& f : a.figures)
            spec.figures.push_back(exp::parse_figure(f));
    }
    else if (command == "backhaul" && custom_axes) {
        spec.figures = {exp::Figure::custom};
    }
    return spec;
}

int finish(const std::string& command, const exp::ExperimentSpec& spec, exp::RunResult& result)
{
    fs::create_directories(spec.out_dir);
    const fs::path results = spec.out_dir / "results.csv";
    {
        std::ofstream out(results);
        exp::write_results(out, result.rows);
    }
    result.files.push_back(results);

    exp::ReportContext ctx{command, spec.preset, spec.seed, spec.replications, config_hash(spec.scenario),
                           utc_timestamp()};
    const exp::Report rep = exp::report(result.rows, ctx);
    const fs::path report_path = spec.out_dir / "report.txt";
    std::ofstream(report_path) << rep.text;
    result.files.push_back(report_path);

    std::ofstream(spec.out_dir / "metadata.json") << exp::metadata(spec, command, result).dump(2) << '\n';
    std::cout << rep.text;
    std::cout << "output: " << spec.out_dir.string() << '\n';
    return rep.ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"LEO satellite IoT random access and backhaul toolkit"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    Common offload_c, backhaul_c, analytic_c, validate_c;
    Axes offload_a, backhaul_a, analytic_a;

    auto* offload = app.add_subcommand("offload", "contention pmfs and access-latency CDFs");
    add_common(offload, offload_c, "offloading");
    add_axes(offload, offload_a, false);

    auto* bh = app.add_subcommand("backhaul", "delay and age sweeps over the satellite chain");
    add_common(bh, backhaul_c, "backhauling");
    add_axes(bh, backhaul_a, true);

    auto* analytic = app.add_subcommand("analytic", "closed-form values only");
    add_common(analytic, analytic_c, "backhauling");
    add_axes(analytic, analytic_a, true);

    auto* val = app.add_subcommand("validate", "check a config against its constraints");
    add_common(val, validate_c, "offloading");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*val) {
            const ScenarioConfig sc = load_scenario(validate_c);
            const auto violations = validate(sc);
            for (const Violation& v : violations)
                std::cout << v.field << ": " << v.rule << '\n';
            if (violations.empty())
                std::cout << "ok (" << sc.name << ", config hash " << fmt::format("{:016x}", config_hash(sc)) << ")\n";
            return violations.empty() ? 0 : 1;
        }
        if (*offload) {
            const auto spec = make_spec("offload", offload_c, offload_a);
            auto result = exp::run_offloading(spec);
            return finish("offload", spec, result);
        }
        if (*bh) {
            const auto spec = make_spec("backhaul", backhaul_c, backhaul_a);
            auto result = exp::run_backhauling(spec);
            return finish("backhaul", spec, result);
        }
        if (*analytic) {
            const auto spec = make_spec("analytic", analytic_c, analytic_a);
            auto result = exp::run_analytic(spec);
            return finish("analytic", spec, result);
        }
    }
    catch (const std::exception& e) {
        std::cerr << "leoiot: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
