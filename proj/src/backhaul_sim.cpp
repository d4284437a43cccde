#include "leoiot/backhaul_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/core.h>

namespace leoiot::backhaul {

std::vector<SourceUpdate> poisson_source(double rate, std::size_t count, Rng& rng)
{
    if (!(rate > 0.0))
        throw std::invalid_argument("source rate must be > 0");
    std::vector<SourceUpdate> out(count);
    double t = 0.0;
    for (auto& u : out) {
        t += exponential(rng, rate);
        u = {t, t};
    }
    return out;
}

std::size_t NetworkTrace::delivered_count() const
{
    return static_cast<std::size_t>(
        std::count_if(packets.begin(), packets.end(), [](const Packet& p) { return p.delivered(); }));
}

double NetworkTrace::delivery_fraction() const
{
    if (packets.empty())
        return 0.0;
    return static_cast<double>(delivered_count()) / static_cast<double>(packets.size());
}

const HopTimes& NetworkTrace::hop(std::size_t packet, int node) const
{
    return hop_times.at(packet * static_cast<std::size_t>(hops) + static_cast<std::size_t>(node));
}

NetworkTrace simulate_backhaul(std::span<const SourceUpdate> source, const BackhaulConfig& cfg,
                               std::uint64_t seed, double horizon, const SimOptions& options)
{
    const int hops = cfg.hops();
    if (hops < 1 || cfg.link_erasures.size() != cfg.service_rates.size())
        throw std::invalid_argument("backhaul needs one service rate and one erasure per hop");
    for (int n = 0; n < hops; ++n) {
        const auto i = static_cast<std::size_t>(n);
        if (!(cfg.service_rates[i] > 0.0))
            throw std::invalid_argument(fmt::format("service rate of node {} must be > 0", n + 1));
        if (!(cfg.link_erasures[i] >= 0.0 && cfg.link_erasures[i] <= 1.0))
            throw std::invalid_argument(fmt::format("erasure of link {} outside [0, 1]", n + 1));
    }

    NetworkTrace trace;
    trace.hops = hops;
    trace.horizon = horizon;
    trace.nodes.resize(static_cast<std::size_t>(hops));

    const auto end = std::lower_bound(source.begin(), source.end(), horizon,
                                      [](const SourceUpdate& u, double h) { return u.arrival < h; });
    const auto count = static_cast<std::size_t>(end - source.begin());
    trace.packets.reserve(count);
    if (options.record_hops) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        trace.hop_times.assign(count * static_cast<std::size_t>(hops), HopTimes{nan, nan, nan});
        trace.service_times.assign(count * static_cast<std::size_t>(hops), nan);
    }

    Rng rng = make_rng(seed);
    std::vector<double> last_departure(static_cast<std::size_t>(hops), -std::numeric_limits<double>::infinity());
    std::vector<std::deque<double>> in_node(options.buffer_capacity > 0 ? static_cast<std::size_t>(hops) : 0);

    double previous_arrival = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) {
        const SourceUpdate& u = source[i];
        if (u.arrival < previous_arrival)
            throw std::invalid_argument("source updates must be sorted by arrival");
        previous_arrival = u.arrival;

        Packet p;
        p.index = i;
        p.origin = u.origin;
        p.injection = u.arrival;

        // Packets are processed in arrival order; with FCFS and no overtaking
        // every earlier packet is already final at each node.
        double t = u.arrival;
        for (int n = 0; n < hops; ++n) {
            const auto ni = static_cast<std::size_t>(n);
            NodeStats& node = trace.nodes[ni];

            if (options.buffer_capacity > 0) {
                auto& q = in_node[ni];
                while (!q.empty() && q.front() <= t)
                    q.pop_front();
                if (q.size() >= options.buffer_capacity) {
                    p.status = PacketStatus::overflow;
                    p.drop_node = n + 1;
                    p.exit = t;
                    break;
                }
            }

            ++node.arrivals;
            const double service = exponential(rng, cfg.service_rates[ni]);
            const double lost = uniform01(rng);
            const double start = std::max(t, last_departure[ni]);
            const double departure = start + service;
            last_departure[ni] = departure;
            ++node.served;
            node.busy_time += service;
            node.last_departure = departure;
            if (options.buffer_capacity > 0)
                in_node[ni].push_back(departure);
            if (options.record_hops) {
                trace.hop_times[i * static_cast<std::size_t>(hops) + ni] = {t, start, departure};
                trace.service_times[i * static_cast<std::size_t>(hops) + ni] = service;
            }

            t = departure + options.link_delay;
            if (lost < cfg.link_erasures[ni]) {
                p.status = PacketStatus::erased;
                p.drop_node = n + 1;
                break;
            }
        }
        p.exit = p.status == PacketStatus::overflow ? p.exit : t;
        trace.packets.push_back(p);
    }
    return trace;
}

double mean_system_time(const NetworkTrace& trace, double warmup_fraction)
{
    const double cutoff = warmup_fraction * trace.horizon;
    double sum = 0.0;
    std::size_t n = 0;
    for (const Packet& p : trace.packets) {
        if (!p.delivered() || p.origin < cutoff)
            continue;
        sum += p.system_time();
        ++n;
    }
    if (n == 0)
        throw EmptyResultError("no delivered packets: mean system time is undefined");
    return sum / static_cast<double>(n);
}

AoiSummary average_aoi(const NetworkTrace& trace, const AoiOptions& options)
{
    struct Delivery {
        double time;
        double origin;
    };
    std::vector<Delivery> deliveries;
    deliveries.reserve(trace.packets.size());
    for (const Packet& p : trace.packets)
        if (p.delivered())
            deliveries.push_back({p.exit, p.origin});
    std::stable_sort(deliveries.begin(), deliveries.end(),
                     [](const Delivery& a, const Delivery& b) { return a.time < b.time; });

    const double cutoff = options.warmup_fraction * trace.horizon;
    auto it = deliveries.begin();
    double freshest = -std::numeric_limits<double>::infinity();
    for (; it != deliveries.end() && it->time < cutoff; ++it)
        freshest = std::max(freshest, it->origin);

    if (deliveries.end() - it < 2)
        throw EmptyResultError("average age needs at least two deliveries inside the window");

    const double start = it->time;
    freshest = std::max(freshest, it->origin);
    double now = start;
    double area = 0.0;
    double peak_sum = 0.0;
    std::size_t resets = 0;
    std::size_t used = 1;

    for (++it; it != deliveries.end(); ++it) {
        const double dt = it->time - now;
        area += dt * (now - freshest) + 0.5 * dt * dt;
        now = it->time;
        ++used;
        if (it->origin > freshest) {
            peak_sum += now - freshest;
            ++resets;
            freshest = it->origin;
        }
    }
    if (options.observe_until && *options.observe_until > now) {
        const double dt = *options.observe_until - now;
        area += dt * (now - freshest) + 0.5 * dt * dt;
        now = *options.observe_until;
    }

    AoiSummary s;
    s.average_age = area / (now - start);
    s.mean_system_time = mean_system_time(trace, options.warmup_fraction);
    s.delivery_fraction = trace.delivery_fraction();
    s.mean_peak_age = resets > 0 ? peak_sum / static_cast<double>(resets) : 0.0;
    s.deliveries = used;
    return s;
}

} // namespace leoiot::backhaul
