// Python module: configs travel as INI text, results as plain dicts and lists.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leoiot/backhaul_analytic.hpp"
#include "leoiot/config_io.hpp"
#include "leoiot/ra_analytic.hpp"
#include "leoiot/ra_sim.hpp"
#include "leoiot/sweep.hpp"
#include "leoiot/version.hpp"

namespace py = pybind11;
using namespace leoiot;

namespace {

ScenarioConfig parse(const std::string& ini)
{
    std::istringstream in(ini);
    return read_config(in);
}

ScenarioConfig resolve(const std::string& config)
{
    return config.find('[') == std::string::npos ? preset(config) : parse(config);
}

py::dict simulate_path(const std::string& config, const std::string& path, int attempts, double horizon,
                       std::uint64_t seed)
{
    const ScenarioConfig sc = resolve(config);
    const RatePair rates = split_rates(sc.traffic);
    RaConfig cfg;
    double rate = 0.0;
    if (path == "ground") {
        cfg = sc.ground_ra;
        rate = rates.earth;
    }
    else if (path == "space" && sc.space_ra) {
        cfg = *sc.space_ra;
        rate = rates.space;
    }
    else {
        throw std::invalid_argument("unknown or absent path: " + path);
    }
    if (attempts > 0)
        cfg.max_attempts = attempts;
    const int users = std::max(1, static_cast<int>(std::lround(sc.traffic.users * rate / sc.traffic.total_rate)));
    ra::RaTrace trace;
    {
        py::gil_scoped_release release;
        trace = ra::simulate_access(cfg, {rate / 1000.0, users}, horizon, seed);
    }
    std::vector<double> latencies;
    std::vector<int> successes;
    for (const auto& r : trace.records)
        if (r.latency)
            latencies.push_back(*r.latency);
    for (const auto& r : trace.raos)
        successes.push_back(r.successes);
    py::dict out;
    out["updates"] = trace.records.size();
    out["success_probability"] = trace.success_probability();
    out["latencies_ms"] = latencies;
    out["successes_per_rao"] = successes;
    out["min_latency_ms"] = ra::min_access_delay(ra::access_timing(cfg)) + ra::propagation_overhead(cfg);
    return out;
}

py::list run_sweep(std::vector<double> loads, std::vector<int> hops, std::vector<double> erasures,
                   const std::vector<std::string>& modes, int replications, std::size_t packets, std::uint64_t seed,
                   int workers, const std::string& config)
{
    const ScenarioConfig sc = resolve(config);
    backhaul::SweepGrid g;
    g.loads = std::move(loads);
    g.hops = std::move(hops);
    g.erasures = std::move(erasures);
    for (const auto& m : modes)
        g.modes.push_back(backhaul::parse_mode(m));
    g.replications = replications;
    g.packets = packets;
    g.seed = seed;
    g.workers = workers;
    g.service_rate = sc.backhaul ? sc.backhaul->service_rates.front() : 1.0;
    g.ra = sc.ground_ra;
    g.ra_load = {split_rates(sc.traffic).earth / 1000.0, sc.traffic.users};
    std::vector<backhaul::SweepRow> rows;
    {
        py::gil_scoped_release release;
        rows = backhaul::sweep(g);
    }
    py::list out;
    for (const auto& r : rows) {
        py::dict d;
        d["rho"] = r.load;
        d["hops"] = r.hops;
        d["link_erasure"] = r.erasure;
        d["mode"] = r.mode.name();
        d["replication"] = r.replication;
        d["offered"] = r.offered;
        d["delivered"] = r.delivered;
        d["mean_system_time"] = r.mean_system_time;
        d["average_age"] = r.average_age;
        d["mean_peak_age"] = r.mean_peak_age;
        d["delivery_fraction"] = r.delivery_fraction;
        d["ra_success"] = r.ra_success ? py::cast(*r.ra_success) : py::none();
        out.append(d);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_leoiot, m)
{
    m.doc() = "LEO satellite IoT random access and backhaul toolkit";
    m.attr("__version__") = version;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("preset_ini", [](const std::string& name) { return to_ini(preset(name)); }, py::arg("name"));
    m.def("validate", [](const std::string& config) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : validate(resolve(config)))
            out.emplace_back(v.field, v.rule);
        return out;
    }, py::arg("config"), "Constraint violations of a preset name or INI text; empty when valid.");
    m.def("config_hash", [](const std::string& config) { return config_hash(resolve(config)); }, py::arg("config"));

    m.def("expected_successes", &ra::expected_successes, py::arg("x"), py::arg("preambles"));
    m.def("expected_collided", &ra::expected_collided, py::arg("x"), py::arg("preambles"));
    m.def("collision_prob", &ra::collision_prob, py::arg("x"), py::arg("preambles"));
    m.def("success_prob", &ra::success_prob, py::arg("x"), py::arg("preambles"));
    m.def("max_throughput", &ra::max_throughput, py::arg("preambles"), py::arg("rao_period_ms"));
    m.def("poisson_mean_successes", &ra::poisson_mean_successes, py::arg("lambda_rao"), py::arg("preambles"),
          py::arg("erasure"));
    m.def("poisson_success_prob", &ra::poisson_success_prob, py::arg("lambda_rao"), py::arg("preambles"),
          py::arg("erasure"));

    m.def("mean_network_delay", py::overload_cast<int, double, double>(&backhaul::mean_network_delay),
          py::arg("hops"), py::arg("arrival_rate"), py::arg("service_rate") = 1.0);
    m.def("average_aoi", [](int hops, double arrival_rate, double service_rate, std::vector<double> erasures) {
        backhaul::TandemModel model{hops, arrival_rate, service_rate, std::move(erasures)};
        return model.erasures.empty() ? backhaul::average_aoi_lossless(model) : backhaul::average_aoi_with_errors(model);
    }, py::arg("hops"), py::arg("arrival_rate"), py::arg("service_rate") = 1.0,
       py::arg("erasures") = std::vector<double>{});

    m.def("simulate_access", &simulate_path, py::arg("config") = "offloading", py::arg("path") = "ground",
          py::arg("attempts") = 0, py::arg("horizon") = 2.0e6, py::arg("seed") = 1,
          "Runs one access path; attempts=0 keeps the configured value.");
    m.def("sweep", &run_sweep, py::arg("rho"), py::arg("hops"), py::arg("link_erasure") = std::vector<double>{0.0},
          py::arg("modes") = std::vector<std::string>{"no-ra"}, py::arg("replications") = 1,
          py::arg("packets") = 100000, py::arg("seed") = 1, py::arg("workers") = 1,
          py::arg("config") = "backhauling");
}
