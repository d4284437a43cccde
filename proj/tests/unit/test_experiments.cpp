#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "leoiot/experiments.hpp"
#include "leoiot/trace_io.hpp"

using namespace leoiot;
using namespace leoiot::exp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("leoiot_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentSpec tiny_backhaul(const fs::path& out)
{
    ExperimentSpec spec = backhauling_spec(backhauling_preset());
    spec.figures = {Figure::custom};
    spec.loads = {0.5};
    spec.hops = {2};
    spec.erasures = {0.0};
    spec.modes = {backhaul::FeedMode{0}, backhaul::FeedMode{1}};
    spec.replications = 3;
    spec.packets = 20000;
    spec.out_dir = out;
    return spec;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("figure names")
{
    for (Figure f : {Figure::fig3, Figure::fig4, Figure::fig6, Figure::fig7, Figure::custom})
        CHECK(parse_figure(to_string(f)) == f);
    CHECK_THROWS_AS(parse_figure("fig5"), std::invalid_argument);
    CHECK(default_load_grid().size() == 19);
    CHECK(default_load_grid().front() == doctest::Approx(0.05));
    CHECK(default_load_grid().back() == doctest::Approx(0.95));
}

TEST_CASE("spec validation")
{
    auto spec = backhauling_spec(backhauling_preset());
    CHECK(validate(spec).empty());
    spec.loads.push_back(1.2);
    CHECK_FALSE(validate(spec).empty());
    spec = backhauling_spec(backhauling_preset());
    spec.replications = 0;
    CHECK_FALSE(validate(spec).empty());
    spec = offloading_spec(offloading_preset());
    spec.figures.clear();
    CHECK_FALSE(validate(spec).empty());
}

TEST_CASE("configured link erasure sets the default sweep axis")
{
    ScenarioConfig sc = backhauling_preset();
    CHECK(backhauling_spec(sc).erasures == std::vector<double>{0.0});
    sc.backhaul = BackhaulConfig::homogeneous(2, 1.0, 0.1);
    CHECK(backhauling_spec(sc).erasures == std::vector<double>{0.1});
}

TEST_CASE("estimate")
{
    const std::vector<double> one{2.0};
    CHECK(estimate(one).mean == 2.0);
    CHECK_FALSE(estimate(one).std_error);
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto e = estimate(v);
    CHECK(e.mean == 2.5);
    REQUIRE(e.std_error);
    CHECK(*e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("tolerance rule")
{
    ResultRow r;
    r.value = 1.03;
    r.reference = 1.0;
    r.tolerance = 0.02;
    CHECK_FALSE(within_tolerance(r));
    r.std_error = 0.011;
    CHECK(within_tolerance(r));
    r.std_error.reset();
    r.tolerance = 0.05;
    CHECK(within_tolerance(r));
    r.reference.reset();
    CHECK(within_tolerance(r));
    r.reference = 1.0;
    r.value = std::nan("");
    CHECK_FALSE(within_tolerance(r));
}

TEST_CASE("report")
{
    const auto empty = report({}, {"backhaul", "backhauling", 1, 20, 0, ""});
    CHECK(empty.text.find("no runs") != std::string::npos);
    CHECK(empty.ok());

    ResultRow good;
    good.figure = "fig6";
    good.metric = "mean_system_time";
    good.value = 4.01;
    good.reference = 4.0;
    good.tolerance = 0.02;
    good.replications = 20;
    ResultRow bad = good;
    bad.value = 5.0;
    std::vector<ResultRow> rows{good};
    auto rep = report(rows, {"backhaul", "backhauling", 7, 20, 0, "2026-01-01T00:00:00Z"});
    CHECK(rep.ok());
    CHECK(rep.checks == 1);
    CHECK(rep.text.find("seed: 7") != std::string::npos);
    CHECK(rep.text.find("replications: 20") != std::string::npos);
    rows.push_back(bad);
    rep = report(rows, {"backhaul", "backhauling", 7, 20, 0, ""});
    CHECK_FALSE(rep.ok());
    CHECK(rep.failures == 1);
    CHECK(rep.text.find("FAIL") != std::string::npos);
}

TEST_CASE("backhaul run writes reproducible files")
{
    const auto a_dir = scratch("a");
    const auto b_dir = scratch("b");
    auto spec = tiny_backhaul(a_dir);
    spec.workers = 1;
    const auto a = run_backhauling(spec);
    spec.out_dir = b_dir;
    spec.workers = 3;
    const auto b = run_backhauling(spec);

    REQUIRE(fs::exists(a_dir / "custom_sweep.csv"));
    CHECK(slurp(a_dir / "custom_sweep.csv") == slurp(b_dir / "custom_sweep.csv"));
    std::ostringstream ra, rb;
    write_results(ra, a.rows);
    write_results(rb, b.rows);
    CHECK(ra.str() == rb.str());
    CHECK(metadata(spec, "backhaul", b).dump() ==
          metadata(tiny_backhaul(b_dir), "backhaul", b).dump());

    // Every simulated row carries its full parameter tuple and an error estimate.
    for (const auto& r : a.rows) {
        CHECK(r.rho);
        CHECK(r.hops);
        CHECK(r.link_erasure);
        CHECK_FALSE(r.mode.empty());
        CHECK(r.std_error);
        CHECK(r.replications == 3);
    }
    const std::string csv = slurp(a_dir / "custom_sweep.csv");
    CHECK(csv.rfind("# schema=leoiot.sweep version=", 0) == 0);
    fs::remove_all(a_dir);
    fs::remove_all(b_dir);
}

TEST_CASE("offloading run")
{
    const auto dir = scratch("off");
    auto spec = offloading_spec(offloading_preset());
    spec.scenario.horizon = 2e5;
    spec.replications = 2;
    spec.out_dir = dir;
    spec.export_traces = true;
    const auto res = run_offloading(spec);
    CHECK(fs::exists(dir / "fig3_pmf.csv"));
    CHECK(fs::exists(dir / "fig4_cdf.csv"));
    CHECK(fs::exists(dir / "traces" / "access_ground-k0.5-a1.csv"));
    bool saw_min = false;
    for (const auto& r : res.rows)
        if (r.metric == "min_latency_ms") {
            saw_min = true;
            CHECK(within_tolerance(r));
        }
    CHECK(saw_min);
    // Ground kappa=1, ground and space at kappa=0.5, each for A in {1, 10}.
    std::size_t plateaus = 0;
    for (const auto& r : res.rows)
        plateaus += r.metric == "cdf_plateau";
    CHECK(plateaus == 6);
    fs::remove_all(dir);
}

TEST_CASE("analytic run")
{
    const auto dir = scratch("an");
    auto spec = backhauling_spec(backhauling_preset());
    spec.out_dir = dir;
    const auto res = run_analytic(spec);
    CHECK(fs::exists(dir / "analytic.csv"));
    bool found = false;
    for (const auto& r : res.rows)
        if (r.metric == "mean_system_time" && r.hops == 2 && r.rho && std::abs(*r.rho - 0.5) < 1e-12) {
            CHECK(r.value == doctest::Approx(4.0));
            CHECK_FALSE(r.std_error);
            found = true;
        }
    CHECK(found);
    fs::remove_all(dir);
}

}
