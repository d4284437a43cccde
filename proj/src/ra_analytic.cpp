#include "leoiot/ra_analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/core.h>

namespace leoiot::ra {

namespace {

void require_preambles(int preambles)
{
    if (preambles < 1)
        throw std::invalid_argument("need at least one preamble");
}

void require_contenders(int x)
{
    if (x < 1)
        throw std::invalid_argument("probability defined for x >= 1 contenders");
}

// (1 - 1/R)^(x - 1), with the R = 1 corner handled by pow(0, 0) = 1.
double unique_pick(int x, int preambles)
{
    return std::pow(1.0 - 1.0 / preambles, x - 1);
}

int poisson_support_end(double lambda)
{
    return static_cast<int>(lambda + 12.0 * std::sqrt(lambda) + 40.0);
}

} // namespace

AccessTiming access_timing(const RaConfig& ra)
{
    AccessTiming t;
    t.t_preamble = ra.preamble_duration();
    t.t_rar = ra.rar_duration();
    t.t_msg3 = ra.t_msg3;
    t.t_msg4 = ra.t_msg4;
    t.t_proc1 = ra.t_proc1;
    t.t_proc2 = ra.t_proc2;
    t.t_proc3 = ra.t_proc3;
    t.window = ra.window_subframes();
    t.max_backoff = ra.max_backoff;
    t.form = ra.min_delay_form;
    return t;
}

double new_arrivals_pmf(double lambda_rao, int x)
{
    if (lambda_rao < 0.0)
        throw std::invalid_argument("Poisson mean must be >= 0");
    if (x < 0)
        return 0.0;
    if (lambda_rao == 0.0)
        return x == 0 ? 1.0 : 0.0;
    return std::exp(x * std::log(lambda_rao) - lambda_rao - std::lgamma(x + 1.0));
}

double expected_successes(int x, int preambles)
{
    require_preambles(preambles);
    if (x < 0)
        throw std::invalid_argument("contender count must be >= 0");
    if (x <= 1)
        return x;
    return x * unique_pick(x, preambles);
}

double expected_successes_approx(double x, int preambles)
{
    require_preambles(preambles);
    return x * std::exp(-x / preambles);
}

double max_throughput(int preambles, double rao_period_ms)
{
    require_preambles(preambles);
    if (!(rao_period_ms > 0.0))
        throw std::invalid_argument("RAO period must be > 0");
    return 1000.0 * preambles / rao_period_ms * unique_pick(preambles, preambles);
}

double max_throughput_approx(int preambles, double rao_period_ms)
{
    require_preambles(preambles);
    if (!(rao_period_ms > 0.0))
        throw std::invalid_argument("RAO period must be > 0");
    return 1000.0 * preambles / (std::numbers::e * rao_period_ms);
}

double expected_collided(int x, int preambles)
{
    return x - expected_successes(x, preambles);
}

double collision_prob(int x, int preambles)
{
    require_preambles(preambles);
    require_contenders(x);
    return 1.0 - unique_pick(x, preambles);
}

double collision_prob_approx(double x, int preambles)
{
    require_preambles(preambles);
    return 1.0 - std::exp(-x / preambles);
}

double success_prob(int x, int preambles)
{
    require_preambles(preambles);
    require_contenders(x);
    return unique_pick(x, preambles);
}

double success_prob_approx(double x, int preambles)
{
    require_preambles(preambles);
    return std::exp(-x / preambles);
}

double power_ramping_erasure(int attempt)
{
    if (attempt < 1)
        throw std::invalid_argument("attempt index starts at 1");
    return -std::expm1(-static_cast<double>(attempt));
}

double attempt_failure_prob(int x, int preambles, double erasure)
{
    if (!(erasure >= 0.0 && erasure < 1.0))
        throw std::invalid_argument("erasure probability must lie in [0, 1)");
    const double pc = collision_prob(x, preambles);
    return pc + (1.0 - pc) * erasure;
}

double attempt_success_prob(int x, int preambles, double erasure)
{
    if (!(erasure >= 0.0 && erasure < 1.0))
        throw std::invalid_argument("erasure probability must lie in [0, 1)");
    return success_prob(x, preambles) * (1.0 - erasure);
}

double min_access_delay(const AccessTiming& t)
{
    // The literal form charges the uplink-grant processing time twice and
    // never the preamble processing time.
    const double after_preamble = t.form == MinDelayForm::literal ? t.t_proc2 : t.t_proc1;
    return t.t_preamble + after_preamble + t.t_rar + t.t_proc2 + t.t_proc3 + t.t_msg3 + t.t_msg4;
}

double access_delay(int attempts, const AccessTiming& t, std::span<const double> backoffs, double t_extra)
{
    if (attempts < 1)
        throw std::invalid_argument("at least one attempt is needed");
    if (backoffs.size() != static_cast<std::size_t>(attempts - 1))
        throw std::invalid_argument(
            fmt::format("{} attempts need {} backoffs, got {}", attempts, attempts - 1, backoffs.size()));
    if (t_extra < 0.0)
        throw std::invalid_argument("t_extra must be >= 0");

    double delay = min_access_delay(t) + t_extra;
    for (double bo : backoffs) {
        if (!(bo >= 0.0 && bo <= t.max_backoff))
            throw std::invalid_argument(fmt::format("backoff {} outside [0, {}]", bo, t.max_backoff));
        delay += bo + t.t_preamble + t.t_proc1 + t.window;
    }
    return delay;
}

double stability_margin(double lambda_rao, int preambles)
{
    require_preambles(preambles);
    if (lambda_rao < 0.0)
        throw std::invalid_argument("load must be >= 0");
    return lambda_rao * std::numbers::e / preambles;
}

double poisson_mean_successes(double lambda_rao, int preambles, double erasure)
{
    double mean = 0.0;
    const int end = poisson_support_end(lambda_rao);
    for (int x = 1; x <= end; ++x)
        mean += new_arrivals_pmf(lambda_rao, x) * x * attempt_success_prob(x, preambles, erasure);
    return mean;
}

double poisson_success_prob(double lambda_rao, int preambles, double erasure)
{
    if (lambda_rao == 0.0)
        return 1.0 - erasure;
    return poisson_mean_successes(lambda_rao, preambles, erasure) / lambda_rao;
}

} // namespace leoiot::ra
