#ifndef LEOIOT_SCENARIO_HPP_
#define LEOIOT_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace leoiot {

/// Device population and how its status-update traffic is split between the
/// terrestrial and the space gNB. Rates are in updates per second.
struct TrafficConfig {
    int users = 1000;
    double total_rate = 50.0;
    double ground_ratio = 0.5;
    /// True when the terrestrial gNB has its own link to the core network.
    bool ground_core_link = true;

    /// Homogeneous users: every device generates total_rate / users.
    double per_user_rate() const { return total_rate / users; }
};

/// Erasure model for preamble transmissions.
enum class ErasureModel {
    fixed,        ///< the same erasure probability on every attempt
    power_ramping ///< 1 - exp(-a) on the a-th attempt
};

/// Which closed form is used for the minimum access delay.
enum class MinDelayForm {
    literal,  ///< preamble + proc2 + RAR + proc2 + proc3 + Msg3 + Msg4
    corrected ///< preamble + proc1 + RAR + proc2 + proc3 + Msg3 + Msg4
};

/// Random-access channel of one gNB (NPRACH + NPDCCH). Times in ms.
struct RaConfig {
    int preambles = 36;
    double rao_period = 320.0;
    int repetitions = 1;
    int rar_window = 12;            ///< subframes per repetition
    int grants_per_subframe = 3;
    double erasure_prob = 0.1;
    ErasureModel erasure_model = ErasureModel::fixed;
    double max_backoff = 320.0;
    int max_attempts = 1;
    double extended_prefix = 0.0;
    double max_prop_delay = 0.0;
    /// Message legs (out of four) that pay max_prop_delay on a successful access.
    int prop_legs = 4;

    double t_preamble_base = 5.6;   ///< per repetition
    double t_rar_base = 0.5;        ///< NPDCCH duration per repetition
    double t_msg3 = 1.0;
    double t_msg4 = 1.0;
    double t_proc1 = 2.0;
    double t_proc2 = 5.0;
    double t_proc3 = 4.0;
    MinDelayForm min_delay_form = MinDelayForm::literal;

    double preamble_duration() const { return t_preamble_base * repetitions + extended_prefix; }
    double rar_duration() const { return t_rar_base * repetitions; }
    /// RA response window length in subframes (1 ms each).
    int window_subframes() const { return rar_window * repetitions; }
    /// Grants that fit in one response window.
    int window_capacity() const { return grants_per_subframe * rar_window; }
};

/// Chain of N satellites, each a FCFS server followed by an erasure link.
struct BackhaulConfig {
    std::vector<double> service_rates{1.0, 1.0};
    std::vector<double> link_erasures{0.0, 0.0};

    int hops() const { return static_cast<int>(service_rates.size()); }

    static BackhaulConfig homogeneous(int hops, double service_rate, double erasure);
};

struct ScenarioConfig {
    std::string name = "custom";
    TrafficConfig traffic;
    RaConfig ground_ra;
    std::optional<RaConfig> space_ra;
    std::optional<BackhaulConfig> backhaul;
    std::uint64_t seed = 1;
    double horizon = 2.0e6; ///< ms of simulated RA time
    int replications = 20;
};

struct RatePair {
    double earth = 0.0;
    double space = 0.0;
};

/// Traffic offered to each gNB: kappa * total and (1 - kappa) * total.
RatePair split_rates(const TrafficConfig& traffic);

/// Rates each gNB forwards towards the core network, given the RA failure
/// probability of each path.
RatePair relayed_rates(const TrafficConfig& traffic, double pf_earth, double pf_space);

struct Violation {
    std::string field;
    std::string rule;

    bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate(const TrafficConfig& traffic);
std::vector<Violation> validate(const RaConfig& ra, const std::string& prefix = "ra");
std::vector<Violation> validate(const BackhaulConfig& backhaul);
std::vector<Violation> validate(const ScenarioConfig& config);

/// Flags every node whose thinned arrival rate reaches its service rate.
std::vector<Violation> check_stability(const BackhaulConfig& backhaul, double arrival_rate);

bool is_valid_rao_period(double period);

ScenarioConfig offloading_preset();
ScenarioConfig backhauling_preset();

/// Resolves "offloading" or "backhauling"; throws std::invalid_argument otherwise.
ScenarioConfig preset(const std::string& name);

} // namespace leoiot

#endif // LEOIOT_SCENARIO_HPP_
