#ifndef LEOIOT_EXPERIMENTS_HPP_
#define LEOIOT_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leoiot/scenario.hpp"
#include "leoiot/sweep.hpp"

namespace leoiot::exp {

enum class Figure { fig3, fig4, fig6, fig7, custom };

std::string to_string(Figure f);
Figure parse_figure(const std::string& text);

struct ExperimentSpec {
    ScenarioConfig scenario;
    std::string preset; ///< provenance only; empty for config files
    std::vector<Figure> figures;
    std::vector<double> loads;
    std::vector<int> hops;
    std::vector<double> erasures;
    std::vector<backhaul::FeedMode> modes;
    std::uint64_t seed = 1;
    int replications = 20;
    std::size_t packets = 100000; ///< offered per backhaul replication
    std::filesystem::path out_dir = "out";
    int workers = 1;
    bool export_traces = false;
};

/// 0.05, 0.10, ..., 0.95
std::vector<double> default_load_grid();

ExperimentSpec offloading_spec(const ScenarioConfig& scenario);
ExperimentSpec backhauling_spec(const ScenarioConfig& scenario);

std::vector<Violation> validate(const ExperimentSpec& spec);

struct ResultRow {
    std::string figure;
    std::string curve;
    std::string mode;
    std::optional<int> attempts;
    std::optional<int> hops;
    std::optional<double> link_erasure;
    std::optional<double> rho;
    std::optional<double> ground_ratio;
    std::string metric;
    double value = 0.0;
    std::optional<double> std_error; ///< simulated metrics only
    std::optional<double> reference; ///< analytic counterpart, when one applies
    std::optional<double> tolerance; ///< relative tolerance against reference
    int replications = 0;            ///< 0 for analytic rows
    std::uint64_t seed = 0;

    bool simulated() const { return replications > 0; }
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<std::filesystem::path> files;
};

/// Backhaul sweep axes of a spec, with the RA feed taken from the ground path.
backhaul::SweepGrid sweep_grid(const ExperimentSpec& spec);

/// Contention pmfs and access-latency CDFs. Writes fig3_pmf.csv and fig4_cdf.csv.
RunResult run_offloading(const ExperimentSpec& spec);

/// Delay and age sweeps. Writes <figure>_sweep.csv with per-replication rows.
RunResult run_backhauling(const ExperimentSpec& spec);

/// Closed-form values only; no simulation. Writes analytic.csv.
RunResult run_analytic(const ExperimentSpec& spec);

/// Pass when within the relative tolerance or within 3 standard errors.
bool within_tolerance(const ResultRow& row);

struct Report {
    std::string text;
    std::size_t checks = 0;
    std::size_t failures = 0;
    bool ok() const { return failures == 0; }
};

struct ReportContext {
    std::string command;
    std::string preset;
    std::uint64_t seed = 0;
    int replications = 0;
    std::uint64_t config_hash = 0;
    std::string timestamp;
};

Report report(std::span<const ResultRow> rows, const ReportContext& context);

void write_results(std::ostream& out, std::span<const ResultRow> rows);

nlohmann::json metadata(const ExperimentSpec& spec, const std::string& command, const RunResult& result);

/// Mean and standard error of the mean; the error is empty for fewer than two samples.
struct Estimate {
    double mean = 0.0;
    std::optional<double> std_error;
};

Estimate estimate(std::span<const double> samples);

} // namespace leoiot::exp

#endif // LEOIOT_EXPERIMENTS_HPP_
