#include "leoiot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/core.h>

#include "leoiot/backhaul_analytic.hpp"
#include "leoiot/config_io.hpp"
#include "leoiot/parallel.hpp"
#include "leoiot/ra_analytic.hpp"
#include "leoiot/ra_sim.hpp"
#include "leoiot/trace_io.hpp"
#include "leoiot/version.hpp"

namespace leoiot::exp {

namespace fs = std::filesystem;
using backhaul::FeedMode;

namespace {

constexpr double delay_tolerance = 0.02;
constexpr double age_tolerance = 0.05;
constexpr double ra_tolerance = 0.01;

std::ofstream open_output(const fs::path& path)
{
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    return out;
}

std::string opt(const std::optional<double>& v)
{
    return v ? io::format_number(*v) : std::string{};
}

std::string opt(const std::optional<int>& v)
{
    return v ? std::to_string(*v) : std::string{};
}

// ---------------------------------------------------------------- offloading

struct OffloadCurve {
    std::string name;
    std::string path; ///< ground or space
    double ground_ratio = 0.0;
    int attempts = 1;
    RaConfig ra;
    ra::PathLoad load;
};

struct OffloadSample {
    ra::RaoPmf pmf;
    std::size_t raos = 0;
    double mean_successes = 0.0;
    double success_probability = 0.0;
    double min_latency = std::numeric_limits<double>::infinity();
    std::vector<double> latencies; ///< successes only
    std::size_t records = 0;
    std::vector<ra::AccessRecord> trace_records;
    std::vector<ra::RaoRecord> trace_raos;
};

std::vector<OffloadCurve> offload_curves(const ExperimentSpec& spec, bool cdf)
{
    const ScenarioConfig& sc = spec.scenario;
    std::vector<OffloadCurve> curves;
    for (int attempts : {1, 10}) {
        auto make = [&](std::string path, double kappa, const RaConfig& base) {
            TrafficConfig t = sc.traffic;
            t.ground_ratio = kappa;
            const RatePair rates = split_rates(t);
            OffloadCurve c;
            c.path = path;
            c.ground_ratio = kappa;
            c.attempts = attempts;
            c.ra = base;
            c.ra.max_attempts = attempts;
            const double rate = path == "ground" ? rates.earth : rates.space;
            c.load = {rate / 1000.0, std::max(1, static_cast<int>(std::lround(sc.traffic.users * rate / t.total_rate)))};
            c.name = fmt::format("{}-k{}-a{}", path, io::format_number(kappa), attempts);
            curves.push_back(c);
        };
        if (!cdf) {
            make("ground", sc.traffic.ground_ratio, sc.ground_ra);
            continue;
        }
        make("ground", 1.0, sc.ground_ra);
        if (sc.traffic.ground_ratio < 1.0) {
            make("ground", sc.traffic.ground_ratio, sc.ground_ra);
            if (sc.space_ra)
                make("space", sc.traffic.ground_ratio, *sc.space_ra);
        }
    }
    return curves;
}

OffloadSample run_offload_sample(const OffloadCurve& c, double horizon, std::uint64_t seed, bool keep_trace)
{
    const ra::RaTrace trace = ra::simulate_access(c.ra, c.load, horizon, seed);
    OffloadSample s;
    s.pmf = ra::empirical_pmf(trace);
    s.raos = trace.raos.size();
    double successes = 0.0;
    for (const ra::RaoRecord& r : trace.raos)
        successes += r.successes;
    s.mean_successes = successes / static_cast<double>(trace.raos.size());
    s.success_probability = trace.success_probability();
    s.records = trace.records.size();
    for (const ra::AccessRecord& r : trace.records)
        if (r.latency) {
            s.latencies.push_back(*r.latency);
            s.min_latency = std::min(s.min_latency, *r.latency);
        }
    if (keep_trace) {
        s.trace_records = trace.records;
        s.trace_raos = trace.raos;
    }
    return s;
}

ResultRow offload_row(const ExperimentSpec& spec, const std::string& figure, const OffloadCurve& c)
{
    ResultRow row;
    row.figure = figure;
    row.curve = c.name;
    row.mode = c.path;
    row.attempts = c.attempts;
    row.ground_ratio = c.ground_ratio;
    row.replications = spec.replications;
    row.seed = spec.seed;
    return row;
}

std::vector<OffloadSample> run_curves(const ExperimentSpec& spec, const std::vector<OffloadCurve>& curves,
                                      std::uint64_t tag)
{
    const auto reps = static_cast<std::size_t>(spec.replications);
    std::vector<OffloadSample> samples(curves.size() * reps);
    parallel_for(samples.size(), spec.workers, [&](std::size_t i) {
        const std::size_t c = i / reps;
        const std::size_t r = i % reps;
        samples[i] = run_offload_sample(curves[c], spec.scenario.horizon, derive_seed(spec.seed, {tag, c, r}),
                                        spec.export_traces && r == 0);
    });
    return samples;
}

void export_ra_traces(const ExperimentSpec& spec, const OffloadCurve& c, const OffloadSample& s, RunResult& result)
{
    const fs::path access = spec.out_dir / "traces" / fmt::format("access_{}.csv", c.name);
    const fs::path rao = spec.out_dir / "traces" / fmt::format("rao_{}.csv", c.name);
    auto a = open_output(access);
    io::write_access_records(a, s.trace_records);
    auto b = open_output(rao);
    io::write_rao_records(b, s.trace_raos);
    result.files.push_back(access);
    result.files.push_back(rao);
}

void run_fig3(const ExperimentSpec& spec, RunResult& result)
{
    const auto curves = offload_curves(spec, false);
    const auto samples = run_curves(spec, curves, 3);
    const auto reps = static_cast<std::size_t>(spec.replications);

    const fs::path path = spec.out_dir / "fig3_pmf.csv";
    auto out = open_output(path);
    io::write_schema(out, "fig3_pmf", "curve,attempts,count,total,collided,successful");

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const OffloadCurve& curve = curves[c];
        std::vector<double> total, collided, successful;
        std::vector<double> means, probs;
        double raos = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const OffloadSample& s = samples[c * reps + r];
            const double w = static_cast<double>(s.raos);
            raos += w;
            auto add = [w](std::vector<double>& acc, const std::vector<double>& pmf) {
                acc.resize(std::max(acc.size(), pmf.size()), 0.0);
                for (std::size_t k = 0; k < pmf.size(); ++k)
                    acc[k] += w * pmf[k];
            };
            add(total, s.pmf.total);
            add(collided, s.pmf.collided);
            add(successful, s.pmf.successful);
            means.push_back(s.mean_successes);
            probs.push_back(s.success_probability);
            if (r == 0 && spec.export_traces)
                export_ra_traces(spec, curve, s, result);
        }
        const std::size_t bins = std::max({total.size(), collided.size(), successful.size()});
        total.resize(bins, 0.0);
        collided.resize(bins, 0.0);
        successful.resize(bins, 0.0);
        for (std::size_t k = 0; k < bins; ++k)
            out << curve.name << ',' << curve.attempts << ',' << k << ',' << io::format_number(total[k] / raos) << ','
                << io::format_number(collided[k] / raos) << ',' << io::format_number(successful[k] / raos) << '\n';

        const double lambda_rao = curve.load.rate_per_ms * curve.ra.rao_period;
        ResultRow row = offload_row(spec, "fig3", curve);
        const Estimate m = estimate(means);
        row.metric = "mean_successes_per_rao";
        row.value = m.mean;
        row.std_error = m.std_error;
        if (curve.attempts == 1) {
            row.reference = ra::poisson_mean_successes(lambda_rao, curve.ra.preambles, curve.ra.erasure_prob);
            row.tolerance = ra_tolerance;
        }
        result.rows.push_back(row);

        const Estimate p = estimate(probs);
        row.metric = "success_probability";
        row.value = p.mean;
        row.std_error = p.std_error;
        row.reference.reset();
        row.tolerance.reset();
        result.rows.push_back(row);
    }
    result.files.push_back(path);
}

void run_fig4(const ExperimentSpec& spec, RunResult& result)
{
    const auto curves = offload_curves(spec, true);
    const auto samples = run_curves(spec, curves, 4);
    const auto reps = static_cast<std::size_t>(spec.replications);

    const fs::path path = spec.out_dir / "fig4_cdf.csv";
    auto out = open_output(path);
    io::write_schema(out, "fig4_cdf", "curve,path,ground_ratio,attempts,latency_ms,cdf");

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const OffloadCurve& curve = curves[c];
        std::vector<ra::AccessRecord> pooled;
        std::vector<double> plateaus;
        double min_latency = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < reps; ++r) {
            const OffloadSample& s = samples[c * reps + r];
            plateaus.push_back(s.records ? static_cast<double>(s.latencies.size()) / static_cast<double>(s.records) : 0.0);
            min_latency = std::min(min_latency, s.min_latency);
            // Only the latencies and the record count matter for the CDF.
            for (double l : s.latencies) {
                ra::AccessRecord rec;
                rec.outcome = ra::Outcome::success;
                rec.latency = l;
                pooled.push_back(rec);
            }
            pooled.resize(pooled.size() + (s.records - s.latencies.size()));
        }
        const ra::LatencyCdf cdf = ra::latency_cdf(pooled);

        // 1 ms grid up to the largest observed latency.
        const double top = cdf.latency.empty() ? 0.0 : std::ceil(cdf.latency.back());
        for (double t = 0.0; t <= top; t += 1.0)
            out << curve.name << ',' << curve.path << ',' << io::format_number(curve.ground_ratio) << ','
                << curve.attempts << ',' << io::format_number(t) << ',' << io::format_number(cdf(t)) << '\n';

        ResultRow row = offload_row(spec, "fig4", curve);
        const Estimate p = estimate(plateaus);
        row.metric = "cdf_plateau";
        row.value = p.mean;
        row.std_error = p.std_error;
        if (curve.attempts == 1) {
            const double lambda_rao = curve.load.rate_per_ms * curve.ra.rao_period;
            row.reference = ra::poisson_success_prob(lambda_rao, curve.ra.preambles, curve.ra.erasure_prob);
            row.tolerance = ra_tolerance;
        }
        result.rows.push_back(row);

        row = offload_row(spec, "fig4", curve);
        row.metric = "min_latency_ms";
        row.value = std::isfinite(min_latency) ? min_latency : std::nan("");
        row.reference = ra::min_access_delay(ra::access_timing(curve.ra)) + ra::propagation_overhead(curve.ra);
        row.tolerance = 1e-9;
        result.rows.push_back(row);
    }
    result.files.push_back(path);
}

// ---------------------------------------------------------------- backhauling

std::optional<backhaul::TandemModel> analytic_model(int hops, double rho, double service_rate, double erasure)
{
    if (!(rho > 0.0 && rho < 1.0))
        return std::nullopt;
    return backhaul::TandemModel{hops, rho * service_rate, service_rate,
                                 std::vector<double>(static_cast<std::size_t>(hops), erasure)};
}

void sweep_figure(const ExperimentSpec& spec, const std::string& figure, backhaul::SweepGrid grid,
                  RunResult& result)
{
    const auto rows = backhaul::sweep(grid);

    const fs::path path = spec.out_dir / fmt::format("{}_sweep.csv", figure);
    auto out = open_output(path);
    io::write_sweep_rows(out, rows);
    result.files.push_back(path);

    // Rows arrive grouped by point with replications innermost.
    const auto reps = static_cast<std::size_t>(grid.replications);
    for (std::size_t i = 0; i < rows.size(); i += reps) {
        const backhaul::SweepRow& head = rows[i];
        std::vector<double> t, a, d, s;
        for (std::size_t r = 0; r < reps; ++r) {
            t.push_back(rows[i + r].mean_system_time);
            a.push_back(rows[i + r].average_age);
            d.push_back(rows[i + r].delivery_fraction);
            if (rows[i + r].ra_success)
                s.push_back(*rows[i + r].ra_success);
        }

        ResultRow base;
        base.figure = figure;
        base.mode = head.mode.name();
        base.curve = fmt::format("{}-n{}-e{}", base.mode, head.hops, io::format_number(head.erasure));
        if (head.mode.uses_ra())
            base.attempts = head.mode.attempts;
        base.hops = head.hops;
        base.link_erasure = head.erasure;
        base.rho = head.load;
        base.replications = grid.replications;
        base.seed = grid.seed;

        const auto model = analytic_model(head.hops, head.load, grid.service_rate, head.erasure);
        // The closed forms describe the backhaul alone, so they only bound the Poisson-fed curves.
        const bool compare = model && !head.mode.uses_ra();

        auto push = [&](const std::string& metric, const std::vector<double>& samples, std::optional<double> ref,
                        std::optional<double> tol) {
            ResultRow row = base;
            const Estimate e = estimate(samples);
            row.metric = metric;
            row.value = e.mean;
            row.std_error = e.std_error;
            row.reference = ref;
            row.tolerance = tol;
            result.rows.push_back(row);
        };
        std::optional<double> ref_t, ref_a, ref_d;
        if (compare) {
            ref_t = backhaul::mean_network_delay(*model);
            ref_a = backhaul::average_aoi_with_errors(*model);
            ref_d = backhaul::end_to_end_success(model->erasures);
        }
        push("mean_system_time", t, ref_t, compare ? std::optional(delay_tolerance) : std::nullopt);
        // With erasures the age closed form leans on an independence approximation
        // that drifts high for long chains; it is shown as an overlay only.
        const bool age_check = compare && head.erasure == 0.0;
        push("average_age", a, ref_a, age_check ? std::optional(age_tolerance) : std::nullopt);
        push("delivery_fraction", d, ref_d, compare ? std::optional(delay_tolerance) : std::nullopt);
        if (!s.empty())
            push("ra_success_probability", s, std::nullopt, std::nullopt);
    }
}

void analytic_backhaul_rows(const ExperimentSpec& spec, const std::string& figure,
                            const std::vector<double>& erasures, RunResult& result)
{
    const double mu = spec.scenario.backhaul ? spec.scenario.backhaul->service_rates.front() : 1.0;
    for (double rho : spec.loads)
        for (int n : spec.hops)
            for (double e : erasures) {
                const auto model = analytic_model(n, rho, mu, e);
                if (!model)
                    continue;
                ResultRow row;
                row.figure = figure;
                row.mode = "analytic";
                row.curve = fmt::format("analytic-n{}-e{}", n, io::format_number(e));
                row.hops = n;
                row.link_erasure = e;
                row.rho = rho;
                row.metric = "mean_system_time";
                row.value = backhaul::mean_network_delay(*model);
                result.rows.push_back(row);
                row.metric = "average_age";
                row.value = backhaul::average_aoi_with_errors(*model);
                result.rows.push_back(row);
            }
}

} // namespace

backhaul::SweepGrid sweep_grid(const ExperimentSpec& spec)
{
    const ScenarioConfig& sc = spec.scenario;
    backhaul::SweepGrid g;
    g.loads = spec.loads;
    g.hops = spec.hops;
    g.erasures = spec.erasures;
    g.modes = spec.modes;
    g.replications = spec.replications;
    g.seed = spec.seed;
    g.packets = spec.packets;
    g.service_rate = sc.backhaul ? sc.backhaul->service_rates.front() : 1.0;
    g.ra = sc.ground_ra;
    const RatePair rates = split_rates(sc.traffic);
    g.ra_load = {rates.earth / 1000.0, sc.traffic.users};
    g.workers = spec.workers;
    return g;
}

std::string to_string(Figure f)
{
    switch (f) {
    case Figure::fig3: return "fig3";
    case Figure::fig4: return "fig4";
    case Figure::fig6: return "fig6";
    case Figure::fig7: return "fig7";
    case Figure::custom: return "custom";
    }
    return "?";
}

Figure parse_figure(const std::string& text)
{
    for (Figure f : {Figure::fig3, Figure::fig4, Figure::fig6, Figure::fig7, Figure::custom})
        if (text == to_string(f))
            return f;
    throw std::invalid_argument(fmt::format("unknown figure '{}'", text));
}

std::vector<double> default_load_grid()
{
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i)
        grid.push_back(i * 0.05);
    return grid;
}

ExperimentSpec offloading_spec(const ScenarioConfig& scenario)
{
    ExperimentSpec spec;
    spec.scenario = scenario;
    spec.figures = {Figure::fig3, Figure::fig4};
    spec.seed = scenario.seed;
    spec.replications = scenario.replications;
    return spec;
}

ExperimentSpec backhauling_spec(const ScenarioConfig& scenario)
{
    ExperimentSpec spec;
    spec.scenario = scenario;
    spec.figures = {Figure::fig6, Figure::fig7};
    spec.loads = default_load_grid();
    spec.hops = {1, 2, 4, 6};
    // Sweeps use one erasure per link; the configured first link sets the default.
    spec.erasures = {scenario.backhaul && !scenario.backhaul->link_erasures.empty()
                         ? scenario.backhaul->link_erasures.front()
                         : 0.0};
    spec.modes = {FeedMode{0}, FeedMode{1}, FeedMode{10}};
    spec.seed = scenario.seed;
    spec.replications = scenario.replications;
    return spec;
}

std::vector<Violation> validate(const ExperimentSpec& spec)
{
    std::vector<Violation> out = validate(spec.scenario);
    if (spec.figures.empty())
        out.push_back({"figures", "at least one figure or sweep is required"});
    if (spec.replications < 1)
        out.push_back({"replications", "must be >= 1"});
    if (spec.workers < 1)
        out.push_back({"workers", "must be >= 1"});
    const bool sweeps = std::any_of(spec.figures.begin(), spec.figures.end(), [](Figure f) {
        return f == Figure::fig6 || f == Figure::fig7 || f == Figure::custom;
    });
    if (sweeps) {
        if (spec.loads.empty() || spec.hops.empty() || spec.modes.empty())
            out.push_back({"sweep", "needs at least one load, hop count and mode"});
        for (double rho : spec.loads)
            if (!(rho > 0.0 && rho < 1.0))
                out.push_back({"rho", fmt::format("{} outside (0, 1)", rho)});
        for (int n : spec.hops)
            if (n < 1)
                out.push_back({"hops", "must be >= 1"});
        for (double e : spec.erasures)
            if (!(e >= 0.0 && e < 1.0))
                out.push_back({"link_erasure", fmt::format("{} outside [0, 1)", e)});
        if (spec.packets < 2)
            out.push_back({"packets", "must be >= 2"});
    }
    return out;
}

RunResult run_offloading(const ExperimentSpec& spec)
{
    if (const auto v = validate(spec); !v.empty())
        throw std::invalid_argument(fmt::format("invalid experiment: {} {}", v.front().field, v.front().rule));
    RunResult result;
    for (Figure f : spec.figures) {
        if (f == Figure::fig3)
            run_fig3(spec, result);
        else if (f == Figure::fig4)
            run_fig4(spec, result);
    }
    return result;
}

RunResult run_backhauling(const ExperimentSpec& spec)
{
    if (const auto v = validate(spec); !v.empty())
        throw std::invalid_argument(fmt::format("invalid experiment: {} {}", v.front().field, v.front().rule));
    RunResult result;
    for (Figure f : spec.figures) {
        backhaul::SweepGrid grid = sweep_grid(spec);
        if (f == Figure::fig6) {
            grid.erasures = {0.0};
        }
        else if (f == Figure::fig7) {
            grid.erasures = {0.0, 0.01, 0.1};
            grid.modes = {FeedMode{0}, FeedMode{1}};
        }
        else if (f != Figure::custom) {
            continue;
        }
        sweep_figure(spec, to_string(f), grid, result);
    }
    return result;
}

RunResult run_analytic(const ExperimentSpec& spec)
{
    RunResult result;
    const ScenarioConfig& sc = spec.scenario;

    auto ra_rows = [&](const std::string& path, const RaConfig& cfg, double rate_per_s) {
        ResultRow row;
        row.figure = "ra";
        row.curve = path;
        row.mode = path;
        row.ground_ratio = sc.traffic.ground_ratio;
        const double lambda_rao = rate_per_s / 1000.0 * cfg.rao_period;
        const std::vector<std::pair<std::string, double>> metrics{
            {"lambda_rao", lambda_rao},
            {"max_throughput_per_s", ra::max_throughput(cfg.preambles, cfg.rao_period)},
            {"max_throughput_approx_per_s", ra::max_throughput_approx(cfg.preambles, cfg.rao_period)},
            {"stability_margin", ra::stability_margin(lambda_rao, cfg.preambles)},
            {"mean_successes_per_rao", ra::poisson_mean_successes(lambda_rao, cfg.preambles, cfg.erasure_prob)},
            {"single_attempt_success", ra::poisson_success_prob(lambda_rao, cfg.preambles, cfg.erasure_prob)},
            {"min_latency_ms", ra::min_access_delay(ra::access_timing(cfg)) + ra::propagation_overhead(cfg)},
        };
        for (const auto& [name, value] : metrics) {
            row.metric = name;
            row.value = value;
            result.rows.push_back(row);
        }
    };
    const RatePair rates = split_rates(sc.traffic);
    ra_rows("ground", sc.ground_ra, rates.earth);
    if (sc.space_ra)
        ra_rows("space", *sc.space_ra, rates.space);

    if (!spec.loads.empty() && !spec.hops.empty()) {
        std::vector<double> erasures = spec.erasures.empty() ? std::vector<double>{0.0} : spec.erasures;
        analytic_backhaul_rows(spec, "backhaul", erasures, result);
    }

    const fs::path path = spec.out_dir / "analytic.csv";
    auto out = open_output(path);
    write_results(out, result.rows);
    result.files.push_back(path);
    return result;
}

Estimate estimate(std::span<const double> samples)
{
    Estimate e;
    if (samples.empty())
        return {std::nan(""), std::nullopt};
    const double n = static_cast<double>(samples.size());
    e.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    if (samples.size() >= 2) {
        double ss = 0.0;
        for (double x : samples)
            ss += (x - e.mean) * (x - e.mean);
        e.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

bool within_tolerance(const ResultRow& row)
{
    if (!row.reference || !row.tolerance)
        return true;
    const double diff = std::abs(row.value - *row.reference);
    if (!(diff == diff))
        return false;
    if (diff <= *row.tolerance * std::abs(*row.reference))
        return true;
    return row.std_error && diff <= 3.0 * *row.std_error;
}

void write_results(std::ostream& out, std::span<const ResultRow> rows)
{
    io::write_schema(out, "results",
                     "figure,curve,mode,attempts,hops,link_erasure,rho,ground_ratio,metric,value,std_error,"
                     "reference,tolerance,replications,seed");
    for (const ResultRow& r : rows)
        out << r.figure << ',' << r.curve << ',' << r.mode << ',' << opt(r.attempts) << ',' << opt(r.hops) << ','
            << opt(r.link_erasure) << ',' << opt(r.rho) << ',' << opt(r.ground_ratio) << ',' << r.metric << ','
            << io::format_number(r.value) << ',' << opt(r.std_error) << ',' << opt(r.reference) << ','
            << opt(r.tolerance) << ',' << r.replications << ',' << r.seed << '\n';
}

Report report(std::span<const ResultRow> rows, const ReportContext& context)
{
    Report rep;
    std::ostringstream out;
    out << "leoiot " << version << " report";
    if (!context.timestamp.empty())
        out << "  generated " << context.timestamp;
    out << '\n';
    out << fmt::format("command: {}  preset: {}  seed: {}  replications: {}  config hash: {:016x}\n",
                       context.command, context.preset.empty() ? "-" : context.preset, context.seed,
                       context.replications, context.config_hash);

    if (rows.empty()) {
        out << "\n=== no runs ===\n";
        rep.text = out.str();
        return rep;
    }

    std::map<std::string, std::size_t> per_figure;
    for (const ResultRow& r : rows)
        ++per_figure[r.figure];
    out << "rows:";
    for (const auto& [figure, n] : per_figure)
        out << ' ' << figure << '=' << n;
    out << "\n\n";

    out << fmt::format("{:<7} {:<24} {:<24} {:>6} {:>12} {:>10} {:>12} {:>9}  {}\n", "figure", "curve", "metric", "rho",
                       "value", "stderr", "reference", "rel.diff", "status");
    for (const ResultRow& r : rows) {
        std::string status = "-";
        std::string rel = "";
        if (r.reference && r.tolerance) {
            ++rep.checks;
            const bool ok = within_tolerance(r);
            if (!ok)
                ++rep.failures;
            status = ok ? "ok" : fmt::format("FAIL (tol {})", io::format_number(*r.tolerance));
            if (*r.reference != 0.0)
                rel = fmt::format("{:+.4f}", (r.value - *r.reference) / *r.reference);
        }
        out << fmt::format("{:<7} {:<24} {:<24} {:>6} {:>12.6g} {:>10} {:>12} {:>9}  {}\n", r.figure, r.curve, r.metric,
                           r.rho ? fmt::format("{:.2f}", *r.rho) : "", r.value,
                           r.std_error ? fmt::format("{:.3g}", *r.std_error) : "",
                           r.reference ? fmt::format("{:.6g}", *r.reference) : "", rel, status);
    }
    out << fmt::format("\n{} checks, {} failed\n", rep.checks, rep.failures);
    rep.text = out.str();
    return rep;
}

nlohmann::json metadata(const ExperimentSpec& spec, const std::string& command, const RunResult& result)
{
    nlohmann::json j;
    j["tool"] = "leoiot";
    j["version"] = version;
    j["schema_version"] = io::schema_version;
    j["command"] = command;
    j["preset"] = spec.preset;
    j["seed"] = spec.seed;
    j["replications"] = spec.replications;
    j["packets_per_replication"] = spec.packets;
    j["config_hash"] = fmt::format("{:016x}", config_hash(spec.scenario));
    j["config"] = to_ini(spec.scenario);
    nlohmann::json figures = nlohmann::json::array();
    for (Figure f : spec.figures)
        figures.push_back(to_string(f));
    j["figures"] = figures;
    j["rho"] = spec.loads;
    j["hops"] = spec.hops;
    j["link_erasure"] = spec.erasures;
    nlohmann::json modes = nlohmann::json::array();
    for (const FeedMode& m : spec.modes)
        modes.push_back(m.name());
    j["modes"] = modes;
    nlohmann::json files = nlohmann::json::array();
    for (const fs::path& p : result.files)
        files.push_back(fs::relative(p, spec.out_dir).generic_string());
    j["files"] = files;
    return j;
}

} // namespace leoiot::exp
