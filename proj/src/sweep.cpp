#include "leoiot/sweep.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "leoiot/parallel.hpp"
#include "leoiot/ra_analytic.hpp"

namespace leoiot::backhaul {

namespace {

constexpr std::uint64_t tag_ra = 0x5241;
constexpr std::uint64_t tag_source = 0x534f;
constexpr std::uint64_t tag_network = 0x4e57;

std::uint64_t bits(double v)
{
    return std::bit_cast<std::uint64_t>(v);
}

} // namespace

std::string FeedMode::name() const
{
    return uses_ra() ? fmt::format("ra-a{}", attempts) : "no-ra";
}

FeedMode parse_mode(const std::string& text)
{
    if (text == "no-ra" || text == "none" || text == "0")
        return {};
    std::string_view digits = text;
    if (digits.starts_with("ra-"))
        digits.remove_prefix(3);
    if (digits.starts_with("a") || digits.starts_with("A"))
        digits.remove_prefix(1);
    int attempts = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), attempts);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || attempts < 1)
        throw std::invalid_argument(fmt::format("unknown mode '{}' (expected no-ra or ra-a<k>)", text));
    return {attempts};
}

RaFeed ra_feed(const RaConfig& cfg, const ra::PathLoad& load, double horizon, std::uint64_t seed)
{
    const ra::RaTrace trace = ra::simulate_access(cfg, load, horizon, seed);
    RaFeed feed;
    feed.horizon = horizon;
    feed.success_probability = trace.success_probability();
    for (const ra::AccessRecord& r : trace.records)
        if (r.succeeded())
            feed.updates.push_back({r.generation_time, r.completion_time});
    std::stable_sort(feed.updates.begin(), feed.updates.end(),
                     [](const SourceUpdate& a, const SourceUpdate& b) { return a.arrival < b.arrival; });
    return feed;
}

std::vector<SourceUpdate> stretch_feed(const RaFeed& feed, double rate, double& horizon)
{
    if (feed.updates.empty())
        throw EmptyResultError("RA run produced no departures");
    const double departure_rate = static_cast<double>(feed.updates.size()) / feed.horizon;
    const double scale = departure_rate / rate;
    std::vector<SourceUpdate> out(feed.updates.size());
    std::transform(feed.updates.begin(), feed.updates.end(), out.begin(), [scale](const SourceUpdate& u) {
        return SourceUpdate{u.origin * scale, u.arrival * scale};
    });
    // Completions can land exactly on the RA horizon.
    horizon = std::nextafter(feed.horizon * scale, std::numeric_limits<double>::infinity());
    return out;
}

std::vector<SweepRow> sweep(const SweepGrid& grid)
{
    if (grid.loads.empty() || grid.hops.empty() || grid.erasures.empty() || grid.modes.empty())
        throw std::invalid_argument("sweep grid needs at least one load, hop count, erasure and mode");
    if (grid.replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    for (double rho : grid.loads)
        if (!(rho > 0.0 && rho < 1.0))
            throw std::invalid_argument(fmt::format("load {} outside (0, 1)", rho));

    const auto reps = static_cast<std::size_t>(grid.replications);

    // RA runs are shared by every point of the same mode and replication.
    std::vector<FeedMode> ra_modes;
    for (const FeedMode& m : grid.modes)
        if (m.uses_ra() && std::find(ra_modes.begin(), ra_modes.end(), m) == ra_modes.end())
            ra_modes.push_back(m);

    double ra_horizon = 0.0;
    if (!ra_modes.empty()) {
        const double lambda_rao = grid.ra_load.rate_per_ms * grid.ra.rao_period;
        const double single = ra::poisson_success_prob(lambda_rao, grid.ra.preambles, grid.ra.erasure_prob);
        ra_horizon = static_cast<double>(grid.packets) / (grid.ra_load.rate_per_ms * std::max(single, 1e-3));
        ra_horizon = std::max(ra_horizon, grid.ra.rao_period);
    }
    std::vector<RaFeed> feeds(ra_modes.size() * reps);
    parallel_for(feeds.size(), grid.workers, [&](std::size_t i) {
        const FeedMode mode = ra_modes[i / reps];
        const auto rep = i % reps;
        RaConfig cfg = grid.ra;
        cfg.max_attempts = mode.attempts;
        feeds[i] = ra_feed(cfg, grid.ra_load, ra_horizon,
                           derive_seed(grid.seed, {tag_ra, static_cast<std::uint64_t>(mode.attempts), rep}));
    });

    struct Point {
        double load;
        int hops;
        double erasure;
        FeedMode mode;
        std::size_t rep;
    };
    std::vector<Point> points;
    for (double rho : grid.loads)
        for (int n : grid.hops)
            for (double e : grid.erasures)
                for (const FeedMode& m : grid.modes)
                    for (std::size_t r = 0; r < reps; ++r)
                        points.push_back({rho, n, e, m, r});

    std::vector<SweepRow> rows(points.size());
    parallel_for(points.size(), grid.workers, [&](std::size_t i) {
        const Point& pt = points[i];
        const double rate = pt.load * grid.service_rate;
        const BackhaulConfig cfg = BackhaulConfig::homogeneous(pt.hops, grid.service_rate, pt.erasure);

        SweepRow row;
        row.load = pt.load;
        row.hops = pt.hops;
        row.erasure = pt.erasure;
        row.mode = pt.mode;
        row.replication = static_cast<int>(pt.rep);

        std::vector<SourceUpdate> source;
        double horizon = 0.0;
        if (pt.mode.uses_ra()) {
            const auto m = static_cast<std::size_t>(std::find(ra_modes.begin(), ra_modes.end(), pt.mode) - ra_modes.begin());
            const RaFeed& feed = feeds[m * reps + pt.rep];
            source = stretch_feed(feed, rate, horizon);
            row.ra_success = feed.success_probability;
        }
        else {
            Rng rng = make_rng(derive_seed(grid.seed, {tag_source, bits(pt.load), pt.rep}));
            source = poisson_source(rate, grid.packets, rng);
            horizon = std::nextafter(source.back().arrival, std::numeric_limits<double>::infinity());
        }

        const std::uint64_t seed = derive_seed(
            grid.seed, {tag_network, static_cast<std::uint64_t>(pt.mode.attempts), static_cast<std::uint64_t>(pt.hops),
                        bits(pt.load), pt.rep});
        const NetworkTrace trace = simulate_backhaul(source, cfg, seed, horizon);
        const AoiSummary s = average_aoi(trace, {grid.warmup_fraction, std::nullopt});

        row.offered = trace.packets.size();
        row.delivered = trace.delivered_count();
        row.mean_system_time = s.mean_system_time;
        row.average_age = s.average_age;
        row.mean_peak_age = s.mean_peak_age;
        row.delivery_fraction = s.delivery_fraction;
        rows[i] = row;
    });
    return rows;
}

} // namespace leoiot::backhaul
