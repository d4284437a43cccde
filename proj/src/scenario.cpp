#include "leoiot/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

namespace leoiot {

BackhaulConfig BackhaulConfig::homogeneous(int hops, double service_rate, double erasure)
{
    if (hops < 1)
        throw std::invalid_argument("backhaul needs at least one hop");
    BackhaulConfig cfg;
    cfg.service_rates.assign(static_cast<std::size_t>(hops), service_rate);
    cfg.link_erasures.assign(static_cast<std::size_t>(hops), erasure);
    return cfg;
}

RatePair split_rates(const TrafficConfig& traffic)
{
    const double earth = traffic.ground_ratio * traffic.total_rate;
    // Space share is the remainder so the pair always sums to the total.
    return {earth, traffic.total_rate - earth};
}

RatePair relayed_rates(const TrafficConfig& traffic, double pf_earth, double pf_space)
{
    if (pf_earth < 0.0 || pf_earth > 1.0 || pf_space < 0.0 || pf_space > 1.0)
        throw std::invalid_argument("failure probabilities must lie in [0, 1]");

    const RatePair offered = split_rates(traffic);
    const double core = traffic.ground_core_link ? 1.0 : 0.0;
    const double earth_survived = offered.earth * (1.0 - pf_earth);

    RatePair out;
    out.earth = earth_survived * core;
    out.space = offered.space * (1.0 - pf_space) + earth_survived * (1.0 - core);
    return out;
}

bool is_valid_rao_period(double period)
{
    for (double p = 40.0; p <= 5120.0; p *= 2.0)
        if (period == p)
            return true;
    return false;
}

std::vector<Violation> validate(const TrafficConfig& traffic)
{
    std::vector<Violation> out;
    if (traffic.users < 1)
        out.push_back({"traffic.users", "must be >= 1"});
    if (!(traffic.total_rate > 0.0))
        out.push_back({"traffic.total_rate", "must be > 0"});
    if (!(traffic.ground_ratio >= 0.0 && traffic.ground_ratio <= 1.0))
        out.push_back({"traffic.ground_ratio", "must lie in [0, 1]"});
    return out;
}

std::vector<Violation> validate(const RaConfig& ra, const std::string& prefix)
{
    std::vector<Violation> out;
    auto flag = [&](const char* field, const char* rule) {
        out.push_back({fmt::format("{}.{}", prefix, field), rule});
    };

    if (ra.preambles != 12 && ra.preambles != 24 && ra.preambles != 36 && ra.preambles != 48)
        flag("preambles", "must be one of {12, 24, 36, 48}");
    if (!is_valid_rao_period(ra.rao_period))
        flag("rao_period", "must be one of {40, 80, 160, ..., 5120} ms");
    if (ra.repetitions < 1)
        flag("repetitions", "must be >= 1");
    if (ra.rar_window < 1)
        flag("rar_window", "must be >= 1");
    if (ra.grants_per_subframe < 1)
        flag("grants_per_subframe", "must be >= 1");
    if (!(ra.erasure_prob >= 0.0 && ra.erasure_prob < 1.0))
        flag("erasure_prob", "must lie in [0, 1)");
    if (!(ra.max_backoff >= 0.0))
        flag("max_backoff", "must be >= 0");
    if (ra.max_attempts < 1)
        flag("max_attempts", "must be >= 1");
    if (!(ra.extended_prefix >= 0.0))
        flag("extended_prefix", "must be >= 0");
    if (!(ra.max_prop_delay >= 0.0))
        flag("max_prop_delay", "must be >= 0");
    if (ra.prop_legs < 0 || ra.prop_legs > 4)
        flag("prop_legs", "must lie in [0, 4]");

    const std::pair<const char*, double> timings[] = {
        {"t_preamble_base", ra.t_preamble_base}, {"t_rar_base", ra.t_rar_base},
        {"t_msg3", ra.t_msg3},   {"t_msg4", ra.t_msg4},   {"t_proc1", ra.t_proc1},
        {"t_proc2", ra.t_proc2}, {"t_proc3", ra.t_proc3},
    };
    for (const auto& [name, value] : timings)
        if (!(value >= 0.0))
            flag(name, "must be >= 0");
    return out;
}

std::vector<Violation> validate(const BackhaulConfig& backhaul)
{
    std::vector<Violation> out;
    if (backhaul.hops() < 1)
        out.push_back({"backhaul.hops", "must be >= 1"});
    if (backhaul.link_erasures.size() != backhaul.service_rates.size())
        out.push_back({"backhaul.link_erasures", "needs one entry per hop"});
    for (std::size_t n = 0; n < backhaul.service_rates.size(); ++n)
        if (!(backhaul.service_rates[n] > 0.0))
            out.push_back({fmt::format("backhaul.service_rates[{}]", n), "must be > 0"});
    for (std::size_t n = 0; n < backhaul.link_erasures.size(); ++n) {
        const double e = backhaul.link_erasures[n];
        if (!(e >= 0.0 && e < 1.0))
            out.push_back({fmt::format("backhaul.link_erasures[{}]", n), "must lie in [0, 1)"});
    }
    return out;
}

std::vector<Violation> check_stability(const BackhaulConfig& backhaul, double arrival_rate)
{
    std::vector<Violation> out;
    double rate = arrival_rate;
    for (std::size_t n = 0; n < backhaul.service_rates.size(); ++n) {
        if (!(rate < backhaul.service_rates[n]))
            out.push_back({fmt::format("backhaul.service_rates[{}]", n),
                           fmt::format("arrival rate {} must stay below service rate {}", rate,
                                       backhaul.service_rates[n])});
        if (n < backhaul.link_erasures.size())
            rate *= 1.0 - backhaul.link_erasures[n];
    }
    return out;
}

std::vector<Violation> validate(const ScenarioConfig& config)
{
    std::vector<Violation> out = validate(config.traffic);
    auto append = [&out](std::vector<Violation> more) {
        out.insert(out.end(), more.begin(), more.end());
    };

    append(validate(config.ground_ra, "ground_ra"));
    if (config.space_ra)
        append(validate(*config.space_ra, "space_ra"));
    if (config.backhaul) {
        append(validate(*config.backhaul));
        if (config.traffic.ground_core_link)
            out.push_back({"traffic.ground_core_link", "must be false when a backhaul is configured"});
    }
    if (config.traffic.ground_ratio < 1.0 && !config.space_ra)
        out.push_back({"space_ra", "required when ground_ratio < 1"});
    if (!(config.horizon > 0.0))
        out.push_back({"horizon", "must be > 0"});
    if (config.replications < 1)
        out.push_back({"replications", "must be >= 1"});
    return out;
}

ScenarioConfig offloading_preset()
{
    ScenarioConfig cfg;
    cfg.name = "offloading";
    cfg.traffic = {1000, 50.0, 0.5, true};

    cfg.ground_ra.rao_period = 320.0;
    cfg.ground_ra.max_backoff = 320.0;

    RaConfig space;
    space.rao_period = 160.0;
    space.repetitions = 4;
    space.max_backoff = 160.0;
    space.extended_prefix = 2.0;
    space.max_prop_delay = 4.0;
    cfg.space_ra = space;

    cfg.horizon = 2.0e6;
    cfg.replications = 20;
    return cfg;
}

ScenarioConfig backhauling_preset()
{
    ScenarioConfig cfg;
    cfg.name = "backhauling";
    cfg.traffic = {1000, 50.0, 1.0, false};

    cfg.ground_ra.rao_period = 40.0;
    cfg.ground_ra.max_backoff = 160.0;

    cfg.backhaul = BackhaulConfig::homogeneous(2, 1.0, 0.0);
    cfg.horizon = 2.4e6;
    cfg.replications = 20;
    return cfg;
}

ScenarioConfig preset(const std::string& name)
{
    if (name == "offloading")
        return offloading_preset();
    if (name == "backhauling")
        return backhauling_preset();
    throw std::invalid_argument(fmt::format("unknown preset '{}'", name));
}

} // namespace leoiot
