#include "leoiot/ra_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

#include "leoiot/ra_analytic.hpp"

namespace leoiot::ra {

std::size_t RaTrace::success_count() const
{
    return departures.size();
}

double RaTrace::success_probability() const
{
    if (records.empty())
        return 0.0;
    return static_cast<double>(success_count()) / static_cast<double>(records.size());
}

std::vector<Arrival> generate_arrivals(double rate_per_ms, double horizon, int users, Rng& rng)
{
    if (rate_per_ms < 0.0)
        throw std::invalid_argument("arrival rate must be >= 0");
    if (users < 1)
        throw std::invalid_argument("need at least one user");

    std::vector<Arrival> out;
    if (rate_per_ms == 0.0)
        return out;
    out.reserve(static_cast<std::size_t>(rate_per_ms * horizon * 1.05) + 16);
    for (double t = exponential(rng, rate_per_ms); t < horizon; t += exponential(rng, rate_per_ms)) {
        const auto user = static_cast<std::uint32_t>(uniform_index(rng, static_cast<std::uint64_t>(users)));
        out.push_back({user, t});
    }
    return out;
}

double erasure_for_attempt(const RaConfig& cfg, int attempt)
{
    if (cfg.erasure_model == ErasureModel::power_ramping)
        return power_ramping_erasure(attempt);
    return cfg.erasure_prob;
}

RaoOutcome resolve_rao(std::span<const UpdateAttemptState> contenders, const RaConfig& cfg, Rng& rng)
{
    RaoOutcome out;
    out.record.transmissions = static_cast<int>(contenders.size());
    out.fates.resize(contenders.size());

    std::vector<int> choice(contenders.size());
    std::vector<int> count(static_cast<std::size_t>(cfg.preambles), 0);
    for (std::size_t i = 0; i < contenders.size(); ++i) {
        choice[i] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cfg.preambles)));
        ++count[static_cast<std::size_t>(choice[i])];
    }

    for (std::size_t i = 0; i < contenders.size(); ++i) {
        if (count[static_cast<std::size_t>(choice[i])] > 1) {
            out.fates[i] = AttemptFate::collided;
            ++out.record.collided;
        }
        else if (uniform01(rng) < erasure_for_attempt(cfg, contenders[i].attempt)) {
            out.fates[i] = AttemptFate::erased;
            ++out.record.erased;
        }
        else {
            out.fates[i] = AttemptFate::success;
            ++out.record.successes;
        }
    }
    return out;
}

std::vector<std::optional<double>> schedule_grants(int successes, const RaConfig& cfg, Rng& rng)
{
    if (cfg.rar_window < 1)
        throw std::invalid_argument("response window must span at least one subframe");

    std::vector<int> order(static_cast<std::size_t>(std::max(successes, 0)));
    std::iota(order.begin(), order.end(), 0);
    shuffle(order.begin(), order.end(), rng);

    const int capacity = cfg.window_capacity();
    std::vector<std::optional<double>> grants(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const int slot = static_cast<int>(pos);
        if (slot >= capacity)
            continue;
        // Each grant occupies `repetitions` subframes of 1 ms.
        grants[static_cast<std::size_t>(order[pos])] =
            static_cast<double>((slot / cfg.grants_per_subframe) * cfg.repetitions);
    }
    return grants;
}

double failure_detection_time(const RaConfig& cfg, double rao_time)
{
    return rao_time + cfg.preamble_duration() + cfg.t_proc1 + cfg.window_subframes();
}

bool backoff_and_retry(UpdateAttemptState& ue, const RaConfig& cfg, double detection_time, Rng& rng)
{
    if (ue.attempt >= cfg.max_attempts)
        return false;

    const double backoff = uniform01(rng) * cfg.max_backoff;
    const double ready = detection_time + backoff;
    const auto current = ue.next_rao;
    auto next = static_cast<std::int64_t>(std::ceil(ready / cfg.rao_period));
    next = std::max(next, current + 1);

    ue.backoffs.push_back(backoff);
    ue.alignment_wait += static_cast<double>(next) * cfg.rao_period - ready;
    ue.next_rao = next;
    ++ue.attempt;
    return true;
}

double propagation_overhead(const RaConfig& cfg)
{
    return cfg.prop_legs * cfg.max_prop_delay;
}

namespace {

AccessRecord close_record(const UpdateAttemptState& ue, Outcome outcome)
{
    AccessRecord r;
    r.id = ue.id;
    r.user = ue.user;
    r.generation_time = ue.generation_time;
    r.first_rao_time = ue.first_rao_time;
    r.outcome = outcome;
    r.attempts = ue.attempt;
    r.backoff_total = std::accumulate(ue.backoffs.begin(), ue.backoffs.end(), 0.0);
    r.alignment_wait = ue.alignment_wait;
    r.fates = ue.fates;
    return r;
}

} // namespace

RaTrace simulate_access(const RaConfig& cfg, const PathLoad& load, double horizon, std::uint64_t seed)
{
    if (const auto violations = validate(cfg); !violations.empty())
        throw std::invalid_argument(
            fmt::format("invalid RA config: {} {}", violations.front().field, violations.front().rule));
    if (!(horizon >= cfg.rao_period))
        throw std::invalid_argument(
            fmt::format("horizon {} ms does not contain a full RAO period of {} ms", horizon, cfg.rao_period));

    Rng rng = make_rng(seed);
    const std::vector<Arrival> arrivals = generate_arrivals(load.rate_per_ms, horizon, load.users, rng);

    const AccessTiming timing = access_timing(cfg);
    const double propagation = propagation_overhead(cfg);
    const auto rao_count = static_cast<std::int64_t>(std::ceil(horizon / cfg.rao_period));

    RaTrace trace;
    trace.config = cfg;
    trace.horizon = horizon;
    trace.raos.reserve(static_cast<std::size_t>(rao_count));

    std::map<std::int64_t, std::vector<UpdateAttemptState>> retries;
    std::size_t next_arrival = 0;
    std::vector<UpdateAttemptState> contenders;

    for (std::int64_t k = 0; k < rao_count; ++k) {
        const double rao_time = static_cast<double>(k) * cfg.rao_period;

        contenders.clear();
        if (auto it = retries.find(k); it != retries.end()) {
            contenders = std::move(it->second);
            retries.erase(it);
        }
        // Fresh updates wait for the first RAO at or after their generation.
        while (next_arrival < arrivals.size() && arrivals[next_arrival].time <= rao_time) {
            const Arrival& a = arrivals[next_arrival];
            UpdateAttemptState ue;
            ue.id = next_arrival;
            ue.user = a.user;
            ue.generation_time = a.time;
            ue.first_rao_time = rao_time;
            ue.next_rao = k;
            contenders.push_back(std::move(ue));
            ++next_arrival;
        }

        RaoOutcome outcome = resolve_rao(contenders, cfg, rng);
        outcome.record.time = rao_time;

        std::vector<std::size_t> decoded;
        for (std::size_t i = 0; i < contenders.size(); ++i)
            if (outcome.fates[i] == AttemptFate::success)
                decoded.push_back(i);
        const auto grants = schedule_grants(static_cast<int>(decoded.size()), cfg, rng);
        for (std::size_t j = 0; j < decoded.size(); ++j)
            if (!grants[j]) {
                outcome.fates[decoded[j]] = AttemptFate::no_grant;
                ++outcome.record.demoted;
            }

        std::size_t granted = 0;
        const double detection = failure_detection_time(cfg, rao_time);
        for (std::size_t i = 0; i < contenders.size(); ++i) {
            UpdateAttemptState& ue = contenders[i];
            ue.fates.push_back(outcome.fates[i]);

            if (outcome.fates[i] == AttemptFate::success) {
                const double t_extra = *grants[granted++];
                AccessRecord r = close_record(ue, Outcome::success);
                r.t_extra = t_extra;
                r.latency = access_delay(ue.attempt, timing, ue.backoffs, t_extra) + ue.alignment_wait + propagation;
                r.completion_time = ue.first_rao_time + *r.latency;
                if (r.completion_time <= horizon)
                    trace.records.push_back(std::move(r));
                continue;
            }
            if (outcome.fates[i] == AttemptFate::no_grant)
                ++granted;

            if (backoff_and_retry(ue, cfg, detection, rng)) {
                if (ue.next_rao < rao_count)
                    retries[ue.next_rao].push_back(std::move(ue));
            }
            else if (detection <= horizon) {
                AccessRecord r = close_record(ue, Outcome::failure);
                r.completion_time = detection;
                trace.records.push_back(std::move(r));
            }
        }
        trace.raos.push_back(outcome.record);
    }

    std::sort(trace.records.begin(), trace.records.end(),
              [](const AccessRecord& a, const AccessRecord& b) { return a.id < b.id; });
    for (const AccessRecord& r : trace.records)
        if (r.succeeded())
            trace.departures.push_back(r.completion_time);
    std::sort(trace.departures.begin(), trace.departures.end());
    return trace;
}

RaoPmf empirical_pmf(const RaTrace& trace)
{
    if (trace.raos.empty())
        throw std::invalid_argument("trace has no RAOs");

    int max_count = 0;
    for (const RaoRecord& r : trace.raos)
        max_count = std::max(max_count, r.transmissions);

    const auto bins = static_cast<std::size_t>(max_count) + 1;
    RaoPmf pmf{std::vector<double>(bins, 0.0), std::vector<double>(bins, 0.0), std::vector<double>(bins, 0.0)};
    const double w = 1.0 / static_cast<double>(trace.raos.size());
    for (const RaoRecord& r : trace.raos) {
        pmf.total[static_cast<std::size_t>(r.transmissions)] += w;
        pmf.collided[static_cast<std::size_t>(r.collided)] += w;
        pmf.successful[static_cast<std::size_t>(r.successes)] += w;
    }
    return pmf;
}

double LatencyCdf::operator()(double t) const
{
    const auto it = std::upper_bound(latency.begin(), latency.end(), t);
    if (it == latency.begin())
        return 0.0;
    return probability[static_cast<std::size_t>(it - latency.begin()) - 1];
}

LatencyCdf latency_cdf(std::span<const AccessRecord> records)
{
    LatencyCdf cdf;
    for (const AccessRecord& r : records)
        if (r.latency)
            cdf.latency.push_back(*r.latency);
    std::sort(cdf.latency.begin(), cdf.latency.end());

    const double n = static_cast<double>(records.size());
    cdf.probability.resize(cdf.latency.size());
    for (std::size_t i = 0; i < cdf.latency.size(); ++i)
        cdf.probability[i] = static_cast<double>(i + 1) / n;
    cdf.plateau = cdf.latency.empty() ? 0.0 : cdf.probability.back();
    return cdf;
}

} // namespace leoiot::ra
