#ifndef LEOIOT_RA_ANALYTIC_HPP_
#define LEOIOT_RA_ANALYTIC_HPP_

#include <span>

#include "leoiot/scenario.hpp"

/// Closed-form multichannel slotted-ALOHA contention and access-delay results
/// for the four-message random-access procedure.
namespace leoiot::ra {

/// Durations entering the access delay, already scaled by the repetition count.
/// All values in ms.
struct AccessTiming {
    double t_preamble = 5.6; ///< including any extended prefix
    double t_rar = 0.5;
    double t_msg3 = 1.0;
    double t_msg4 = 1.0;
    double t_proc1 = 2.0;
    double t_proc2 = 5.0;
    double t_proc3 = 4.0;
    double window = 12.0;      ///< RA response window, W_rar * repetitions subframes of 1 ms
    double max_backoff = 320.0;
    MinDelayForm form = MinDelayForm::literal;
};

AccessTiming access_timing(const RaConfig& ra);

/// Poisson pmf of fresh contenders in one RAO, mean lambda_rao.
double new_arrivals_pmf(double lambda_rao, int x);

/// Mean number of contenders that pick a preamble nobody else picked.
double expected_successes(int x, int preambles);
double expected_successes_approx(double x, int preambles);

/// Peak success throughput of the RAO channel, in successes per second.
double max_throughput(int preambles, double rao_period_ms);
double max_throughput_approx(int preambles, double rao_period_ms);

double expected_collided(int x, int preambles);

/// Probability that a given contender collides, x >= 1.
double collision_prob(int x, int preambles);
double collision_prob_approx(double x, int preambles);

/// Probability that a given contender picks a unique preamble, x >= 1.
double success_prob(int x, int preambles);
double success_prob_approx(double x, int preambles);

/// 1 - exp(-a) for the a-th attempt.
double power_ramping_erasure(int attempt);

/// Per-attempt failure: collision, or erasure of an uncollided preamble.
double attempt_failure_prob(int x, int preambles, double erasure);
double attempt_success_prob(int x, int preambles, double erasure);

double min_access_delay(const AccessTiming& t);

/// Delay of an access that needs `attempts` preambles. `backoffs` holds the
/// attempts - 1 backoff draws, each within [0, max_backoff].
double access_delay(int attempts, const AccessTiming& t, std::span<const double> backoffs, double t_extra);

/// Mean load per RAO relative to the slotted-ALOHA limit R/e. Above 1 is unstable.
double stability_margin(double lambda_rao, int preambles);

/// Mean decoded preambles per RAO when contenders are Poisson(lambda_rao).
double poisson_mean_successes(double lambda_rao, int preambles, double erasure);

/// Fraction of Poisson contenders that succeed on their only attempt.
double poisson_success_prob(double lambda_rao, int preambles, double erasure);

} // namespace leoiot::ra

#endif // LEOIOT_RA_ANALYTIC_HPP_
