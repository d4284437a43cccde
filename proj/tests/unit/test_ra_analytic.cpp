#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "../oracles/aloha_enumeration.hpp"
#include "../oracles/numeric.hpp"
#include "leoiot/ra_analytic.hpp"

using namespace leoiot;
using namespace leoiot::ra;

TEST_SUITE("ra_analytic") {

TEST_CASE("Poisson pmf of fresh contenders")
{
    CHECK(new_arrivals_pmf(0.0, 0) == 1.0);
    CHECK(new_arrivals_pmf(0.0, 3) == 0.0);
    CHECK(new_arrivals_pmf(2.0, 1) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
    const double lambda = 320.0 * 50.0 / 1000.0;
    CHECK(lambda == 16.0);
    CHECK(std::abs(new_arrivals_pmf(lambda, 16) - oracle::poisson_pmf_factorial(lambda, 16)) < 1e-12);
    double total = 0.0;
    for (int x = 0; x < 200; ++x)
        total += new_arrivals_pmf(16.0, x);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(new_arrivals_pmf(-1.0, 0), std::invalid_argument);
}

TEST_CASE("slotted ALOHA moments match exhaustive enumeration")
{
    for (int r = 1; r <= 4; ++r)
        for (int x = 0; x <= 5; ++x) {
            CAPTURE(r);
            CAPTURE(x);
            const auto m = oracle::enumerate_aloha(x, r);
            CHECK(std::abs(expected_successes(x, r) - m.successes) < 1e-12);
            CHECK(std::abs(expected_collided(x, r) - m.collided) < 1e-12);
            if (x >= 1) {
                CHECK(std::abs(collision_prob(x, r) - m.tagged_collision) < 1e-12);
                CHECK(std::abs(success_prob(x, r) - (1.0 - m.tagged_collision)) < 1e-12);
            }
        }
}

TEST_CASE("expected successes corner values")
{
    CHECK(expected_successes(0, 36) == 0.0);
    CHECK(expected_successes(1, 36) == 1.0);
    CHECK(expected_successes(2, 1) == 0.0);
    CHECK(expected_successes(36, 36) == doctest::Approx(36.0 * std::pow(35.0 / 36.0, 35)));
    CHECK(expected_successes(36, 36) == doctest::Approx(13.43).epsilon(0.001));
    CHECK_THROWS_AS(collision_prob(0, 36), std::invalid_argument);
    CHECK_THROWS_AS(expected_successes(3, 0), std::invalid_argument);
}

TEST_CASE("successes peak at x = R")
{
    for (int r : {12, 24, 36, 48}) {
        int best = 0;
        for (int x = 1; x <= 4 * r; ++x)
            if (expected_successes(x, r) > expected_successes(best, r))
                best = x;
        // x = R and x = R - 1 tie exactly; the first maximiser found is R - 1.
        CHECK(expected_successes(r, r) == doctest::Approx(expected_successes(best, r)).epsilon(1e-14));
        CHECK(expected_successes(r, r) > expected_successes(r + 1, r));
    }
}

TEST_CASE("maximum throughput")
{
    CHECK(max_throughput(36, 40.0) == doctest::Approx(335.8).epsilon(0.0005));
    const double approx = 1000.0 * 36 / (std::numbers::e * 40.0);
    CHECK(max_throughput_approx(36, 40.0) == doctest::Approx(approx));
    CHECK(std::abs(max_throughput(36, 40.0) / approx - 1.0) < 0.02);
    for (int r : {12, 24, 48})
        CHECK(max_throughput(r, 320.0) > max_throughput_approx(r, 320.0));
}

TEST_CASE("large-x approximations converge")
{
    // Relative error of the exponential form is O(1/R) at fixed x.
    double prev = 1.0;
    for (int r : {100, 1000, 10000, 100000}) {
        const double err = std::abs(success_prob_approx(10.0, r) / success_prob(10, r) - 1.0);
        CHECK(err < 2.0 / r);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(expected_successes_approx(20.0, 20000) == doctest::Approx(expected_successes(20, 20000)).epsilon(1e-4));
    CHECK(collision_prob_approx(10.0, 1000) == doctest::Approx(collision_prob(10, 1000)).epsilon(1e-3));
}

TEST_CASE("per-attempt failure and success")
{
    CHECK(attempt_failure_prob(1, 36, 0.0) == 0.0);
    CHECK(attempt_failure_prob(1, 36, 0.1) == doctest::Approx(0.1));
    CHECK(attempt_failure_prob(2, 1, 0.1) == 1.0);
    for (int x = 1; x < 80; ++x)
        CHECK(attempt_failure_prob(x, 36, 0.1) + attempt_success_prob(x, 36, 0.1) == doctest::Approx(1.0));
    CHECK(power_ramping_erasure(1) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK_THROWS_AS(power_ramping_erasure(0), std::invalid_argument);
    CHECK_THROWS_AS(attempt_failure_prob(3, 36, 1.0), std::invalid_argument);
}

TEST_CASE("minimum access delay")
{
    RaConfig ground;
    CHECK(min_access_delay(access_timing(ground)) == doctest::Approx(22.1).epsilon(1e-12));
    ground.min_delay_form = MinDelayForm::corrected;
    CHECK(min_access_delay(access_timing(ground)) == doctest::Approx(19.1).epsilon(1e-12));

    const RaConfig space = *offloading_preset().space_ra;
    const double space_min = min_access_delay(access_timing(space));
    // 4 repetitions and a 2 ms prefix on the preamble, 4x the RAR duration.
    CHECK(space_min == doctest::Approx(22.1 + 3 * 5.6 + 2.0 + 1.5));
    CHECK(space_min > min_access_delay(access_timing(offloading_preset().ground_ra)));
}

TEST_CASE("access delay with retries")
{
    const AccessTiming t = access_timing(RaConfig{});
    CHECK(access_delay(1, t, {}, 0.0) == doctest::Approx(22.1));
    CHECK(access_delay(1, t, {}, 3.0) == doctest::Approx(25.1));
    const std::vector<double> bo{100.0, 0.0};
    // Each retry adds its backoff, a preamble, preamble processing and a full response window.
    CHECK(access_delay(3, t, bo, 0.0) == doctest::Approx(22.1 + 100.0 + 2 * (5.6 + 2.0 + 12.0)));
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(access_delay(3, t, one, 0.0), std::invalid_argument);
    const std::vector<double> too_long{321.0};
    CHECK_THROWS_AS(access_delay(2, t, too_long, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(access_delay(0, t, {}, 0.0), std::invalid_argument);
}

TEST_CASE("Poisson-averaged successes")
{
    double direct = 0.0;
    for (int x = 1; x < 120; ++x)
        direct += oracle::poisson_pmf_factorial(8.0, x) * expected_successes(x, 36) * 0.9;
    CHECK(poisson_mean_successes(8.0, 36, 0.1) == doctest::Approx(direct).epsilon(1e-10));
    CHECK(poisson_success_prob(1e-9, 36, 0.1) == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(poisson_success_prob(0.0, 36, 0.1) == doctest::Approx(0.9));
    CHECK(poisson_success_prob(36.0, 36, 0.0) < 0.4);
    CHECK(stability_margin(36.0 / std::numbers::e, 36) == doctest::Approx(1.0));
}


TEST_CASE("property: contention moments stay consistent over random (x, R)")
{
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<int> pick_r(1, 64), pick_x(1, 300);
    for (int trial = 0; trial < 2000; ++trial) {
        const int r = pick_r(gen);
        const int x = pick_x(gen);
        const double s = expected_successes(x, r);
        const double c = expected_collided(x, r);
        CHECK(s >= 0.0);
        CHECK(s <= std::min(x, r) + 1e-12);
        CHECK(s + c == doctest::Approx(x));
        CHECK(collision_prob(x, r) >= 0.0);
        CHECK(collision_prob(x, r) <= 1.0);
        CHECK(success_prob(x, r) + collision_prob(x, r) == doctest::Approx(1.0));
        CHECK(s <= expected_successes(r, r) * (1.0 + 1e-12));
        if (x > 1)
            CHECK(collision_prob(x, r) >= collision_prob(x - 1, r) - 1e-15);
    }
}

}
