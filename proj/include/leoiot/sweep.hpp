#ifndef LEOIOT_SWEEP_HPP_
#define LEOIOT_SWEEP_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leoiot/backhaul_sim.hpp"
#include "leoiot/ra_sim.hpp"
#include "leoiot/scenario.hpp"

namespace leoiot::backhaul {

/// How updates reach the first satellite. attempts == 0 feeds Poisson
/// arrivals directly; otherwise they come out of the RA procedure with that
/// many preamble attempts.
struct FeedMode {
    int attempts = 0;

    bool uses_ra() const { return attempts > 0; }
    std::string name() const;
    bool operator==(const FeedMode&) const = default;
};

/// Parses "no-ra" or "ra-a<k>" (also "a<k>" and a bare count).
FeedMode parse_mode(const std::string& text);

struct SweepGrid {
    std::vector<double> loads;
    std::vector<int> hops;
    std::vector<double> erasures;
    std::vector<FeedMode> modes;
    int replications = 1;
    std::uint64_t seed = 1;
    /// Updates offered to the backhaul per replication.
    std::size_t packets = 100000;
    double service_rate = 1.0;
    double warmup_fraction = 0.05;
    /// RA stage used by the RA-fed modes.
    RaConfig ra;
    ra::PathLoad ra_load;
    int workers = 1;
};

struct SweepRow {
    double load = 0.0;
    int hops = 0;
    double erasure = 0.0;
    FeedMode mode;
    int replication = 0;
    std::size_t offered = 0;
    std::size_t delivered = 0;
    double mean_system_time = 0.0;
    double average_age = 0.0;
    double mean_peak_age = 0.0;
    double delivery_fraction = 0.0;
    std::optional<double> ra_success;
};

/// Departures of one RA run, in ms.
struct RaFeed {
    std::vector<SourceUpdate> updates; ///< origin = generation, arrival = grant completion
    double horizon = 0.0;
    double success_probability = 0.0;
};

RaFeed ra_feed(const RaConfig& cfg, const ra::PathLoad& load, double horizon, std::uint64_t seed);

/// Rescales an RA feed so that its departure rate equals `rate` per backhaul
/// time unit. Returns the scaled updates and sets `horizon` accordingly.
std::vector<SourceUpdate> stretch_feed(const RaFeed& feed, double rate, double& horizon);

/// One row per (load, hops, erasure, mode, replication), ordered by those
/// keys regardless of the worker count.
std::vector<SweepRow> sweep(const SweepGrid& grid);

} // namespace leoiot::backhaul

#endif // LEOIOT_SWEEP_HPP_
