#ifndef LEOIOT_RA_SIM_HPP_
#define LEOIOT_RA_SIM_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "leoiot/random.hpp"
#include "leoiot/scenario.hpp"

namespace leoiot::ra {

enum class AttemptFate : std::uint8_t {
    success,
    collided,
    erased,
    no_grant ///< decoded, but the response window was already full
};

enum class Outcome : std::uint8_t { success, failure };

struct Arrival {
    std::uint32_t user = 0;
    double time = 0.0;
};

/// One update working through the RA procedure.
struct UpdateAttemptState {
    std::uint64_t id = 0;
    std::uint32_t user = 0;
    double generation_time = 0.0;
    double first_rao_time = 0.0;
    int attempt = 1;
    std::int64_t next_rao = 0;
    std::vector<AttemptFate> fates;
    std::vector<double> backoffs;  ///< drawn backoff before each retry
    double alignment_wait = 0.0;   ///< time from backoff expiry to the next RAO, summed
};

struct RaoRecord {
    double time = 0.0;
    int transmissions = 0;
    int successes = 0; ///< decoded preambles, granted or not
    int collided = 0;
    int erased = 0;
    int demoted = 0;   ///< decoded but not granted; subset of successes
};

struct AccessRecord {
    std::uint64_t id = 0;
    std::uint32_t user = 0;
    double generation_time = 0.0;
    double first_rao_time = 0.0;
    Outcome outcome = Outcome::failure;
    int attempts = 0;
    /// Measured from the first preamble; absent for failed accesses.
    std::optional<double> latency;
    /// Grant completion on success, failure declaration otherwise.
    double completion_time = 0.0;
    double t_extra = 0.0;
    double backoff_total = 0.0;
    double alignment_wait = 0.0;
    std::vector<AttemptFate> fates;

    bool succeeded() const { return outcome == Outcome::success; }
};

struct RaTrace {
    RaConfig config;
    double horizon = 0.0;
    std::vector<RaoRecord> raos;
    /// Updates resolved inside the horizon, ordered by id.
    std::vector<AccessRecord> records;
    /// Sorted completion times of successful updates.
    std::vector<double> departures;

    std::size_t success_count() const;
    double success_probability() const;
};

/// Offered load of one access path.
struct PathLoad {
    double rate_per_ms = 0.0;
    int users = 1;
};

std::vector<Arrival> generate_arrivals(double rate_per_ms, double horizon, int users, Rng& rng);

/// Erasure probability of the a-th attempt under the configured model.
double erasure_for_attempt(const RaConfig& cfg, int attempt);

/// Contention outcome of one RAO. `fates[i]` belongs to contenders[i] and is
/// one of success, collided or erased.
struct RaoOutcome {
    RaoRecord record;
    std::vector<AttemptFate> fates;
};

RaoOutcome resolve_rao(std::span<const UpdateAttemptState> contenders, const RaConfig& cfg, Rng& rng);

/// Grant placement for the decoded preambles of one RAO. Entry i is the grant
/// offset inside the response window (t_extra, ms) of success i, or empty when
/// the window overflowed.
std::vector<std::optional<double>> schedule_grants(int successes, const RaConfig& cfg, Rng& rng);

/// Failure detection: preamble end + preamble processing + full response window.
double failure_detection_time(const RaConfig& cfg, double rao_time);

/// Moves a failed update to its next RAO, or returns false when it has used
/// all attempts.
bool backoff_and_retry(UpdateAttemptState& ue, const RaConfig& cfg, double detection_time, Rng& rng);

/// Propagation added to every successful access on this path.
double propagation_overhead(const RaConfig& cfg);

/// Runs the RA procedure over [0, horizon) ms. Updates still in progress at
/// the horizon are left out of the records.
RaTrace simulate_access(const RaConfig& cfg, const PathLoad& load, double horizon, std::uint64_t seed);

struct RaoPmf {
    std::vector<double> total;
    std::vector<double> collided;
    std::vector<double> successful;
};

RaoPmf empirical_pmf(const RaTrace& trace);

/// Right-continuous CDF of the access latency. Failures count in the
/// denominator only, so the curve levels off at the success probability.
struct LatencyCdf {
    std::vector<double> latency;
    std::vector<double> probability;
    double plateau = 0.0;

    double operator()(double t) const;
};

LatencyCdf latency_cdf(std::span<const AccessRecord> records);

} // namespace leoiot::ra

#endif // LEOIOT_RA_SIM_HPP_
