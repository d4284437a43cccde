#ifndef LEOIOT_BACKHAUL_SIM_HPP_
#define LEOIOT_BACKHAUL_SIM_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "leoiot/random.hpp"
#include "leoiot/scenario.hpp"

namespace leoiot::backhaul {

/// Update entering the first satellite. `origin` is when the device generated
/// it, `arrival` when it reaches node 1 (equal for a direct Poisson feed).
struct SourceUpdate {
    double origin = 0.0;
    double arrival = 0.0;
};

std::vector<SourceUpdate> poisson_source(double rate, std::size_t count, Rng& rng);

enum class PacketStatus : std::uint8_t { delivered, erased, overflow };

struct Packet {
    std::uint64_t index = 0;
    double origin = 0.0;
    double injection = 0.0;
    /// Delivery time, or the time the packet was lost.
    double exit = 0.0;
    PacketStatus status = PacketStatus::delivered;
    int drop_node = 0; ///< 1-based node after which it was lost, 0 when delivered

    bool delivered() const { return status == PacketStatus::delivered; }
    double system_time() const { return exit - origin; }
};

/// Arrival, service start and departure of one packet at one node.
struct HopTimes {
    double arrival = 0.0;
    double start = 0.0;
    double departure = 0.0;
};

struct NodeStats {
    std::uint64_t arrivals = 0;
    std::uint64_t served = 0;
    double busy_time = 0.0;
    double last_departure = 0.0;
};

struct NetworkTrace {
    int hops = 0;
    double horizon = 0.0;
    std::vector<Packet> packets;
    std::vector<NodeStats> nodes;
    /// Row-major [packet][node]; filled only when hop recording is on. Nodes a
    /// packet never reached hold NaN.
    std::vector<HopTimes> hop_times;
    /// Service times drawn per [packet][node] when hop recording is on.
    std::vector<double> service_times;

    std::size_t delivered_count() const;
    double delivery_fraction() const;
    const HopTimes& hop(std::size_t packet, int node) const;
};

struct SimOptions {
    /// Per-node capacity including the packet in service; 0 means infinite.
    std::size_t buffer_capacity = 0;
    /// Constant propagation added on every link.
    double link_delay = 0.0;
    bool record_hops = false;
};

/// Serves every source update with arrival < horizon through the chain. The
/// source must be sorted by arrival.
NetworkTrace simulate_backhaul(std::span<const SourceUpdate> source, const BackhaulConfig& cfg,
                               std::uint64_t seed, double horizon, const SimOptions& options = {});

/// Raised when a summary needs more deliveries than the trace holds.
class EmptyResultError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mean generation-to-delivery time over delivered packets generated at or
/// after warmup_fraction * horizon.
double mean_system_time(const NetworkTrace& trace, double warmup_fraction = 0.0);

struct AoiOptions {
    /// Deliveries before warmup_fraction * horizon only set the initial freshness.
    double warmup_fraction = 0.05;
    /// Integrate up to this time instead of the last delivery, if later.
    std::optional<double> observe_until;
};

struct AoiSummary {
    double average_age = 0.0;
    double mean_system_time = 0.0;
    double delivery_fraction = 0.0;
    double mean_peak_age = 0.0;
    std::size_t deliveries = 0;
};

/// Time-average of the sawtooth t - u(t), with u(t) the generation time of
/// the freshest update delivered so far. Integration starts at the first
/// delivery inside the window; stale deliveries leave the age untouched.
AoiSummary average_aoi(const NetworkTrace& trace, const AoiOptions& options = {});

} // namespace leoiot::backhaul

#endif // LEOIOT_BACKHAUL_SIM_HPP_
