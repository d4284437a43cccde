#include "leoiot/backhaul_analytic.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/core.h>

namespace leoiot::backhaul {

namespace {

void require_stable(double arrival_rate, double service_rate)
{
    if (!(arrival_rate > 0.0))
        throw AnalyticError("arrival rate must be > 0");
    if (!(service_rate > 0.0))
        throw AnalyticError("service rate must be > 0");
    if (!(arrival_rate < service_rate))
        throw AnalyticError(
            fmt::format("unstable tandem: arrival rate {} >= service rate {}", arrival_rate, service_rate));
}

double link_erasure(const TandemModel& model, int link)
{
    if (model.erasures.empty())
        return 0.0;
    return model.erasures[static_cast<std::size_t>(link)];
}

void require_erasures(const TandemModel& model)
{
    if (!model.erasures.empty() && static_cast<int>(model.erasures.size()) != model.hops)
        throw std::invalid_argument("need one erasure probability per link");
}

// E[WY] for hops N, interarrival rate lambda and per-node Erlang rate alpha
// with lambda + alpha = mu.
double expected_wy_impl(int hops, double lambda, double mu)
{
    namespace bm = boost::math;
    const double alpha = mu - lambda;
    const double n = hops;
    const double s = (hops - 1) / mu;

    // Gamma(N, x) / Gamma(N) = Q(N, x) and Gamma(N + 1, x) / Gamma(N) = N Q(N + 1, x).
    const double q_alpha = bm::gamma_q(n, alpha * s);
    const double q1_alpha = n * bm::gamma_q(n + 1.0, alpha * s);
    const double q_mu = bm::gamma_q(n, mu * s);
    const double q1_mu = n * bm::gamma_q(n + 1.0, mu * s);

    const double first = -(alpha * (lambda * s + 2.0) * q_alpha - lambda * q1_alpha) / (alpha * lambda * lambda);

    const double log_scale = n * std::log(alpha / mu) + lambda * s;
    const double scale = std::exp(log_scale);
    const double second = -scale / (lambda * lambda * mu) * (mu * (lambda * s - 2.0) * q_mu - lambda * q1_mu);

    const double value = first + second;
    if (!std::isfinite(value))
        throw AnalyticError(fmt::format("E[WY] overflowed for N={} lambda={} mu={}", hops, lambda, mu));
    return value;
}

// Homogeneous tandem whose Erlang mean matches the thinned-rate delay.
double equivalent_arrival_rate(const TandemModel& model)
{
    return model.service_rate - model.hops / mean_network_delay(model);
}

} // namespace

TandemModel TandemModel::lossless(int hops, double arrival_rate, double service_rate)
{
    return TandemModel{hops, arrival_rate, service_rate, std::vector<double>(static_cast<std::size_t>(hops), 0.0)};
}

double effective_rate(double arrival_rate, std::span<const double> erasures, int node)
{
    if (node < 1 || node > static_cast<int>(erasures.size()) + 1)
        throw std::invalid_argument(fmt::format("node {} outside 1..{}", node, erasures.size() + 1));
    double rate = arrival_rate;
    for (int l = 0; l < node - 1; ++l)
        rate *= 1.0 - erasures[static_cast<std::size_t>(l)];
    return rate;
}

double system_time_pdf(double t, int hops, double alpha)
{
    if (hops < 1)
        throw std::invalid_argument("hops must be >= 1");
    if (!(alpha > 0.0))
        throw std::invalid_argument("alpha must be > 0");
    if (t < 0.0)
        return 0.0;
    if (t == 0.0)
        return hops == 1 ? alpha : 0.0;
    const double n = hops;
    return std::exp(n * std::log(alpha) + (n - 1.0) * std::log(t) - alpha * t - std::lgamma(n));
}

double mean_network_delay(int hops, double arrival_rate, double service_rate)
{
    if (hops < 1)
        throw std::invalid_argument("hops must be >= 1");
    if (!(arrival_rate >= 0.0))
        throw AnalyticError("arrival rate must be >= 0");
    if (!(arrival_rate < service_rate))
        throw AnalyticError(
            fmt::format("unstable tandem: arrival rate {} >= service rate {}", arrival_rate, service_rate));
    return hops / (service_rate - arrival_rate);
}

double mean_network_delay(const TandemModel& model)
{
    require_erasures(model);
    double delay = 0.0;
    double rate = model.arrival_rate;
    for (int n = 0; n < model.hops; ++n) {
        delay += mean_network_delay(1, rate, model.service_rate);
        rate *= 1.0 - link_erasure(model, n);
    }
    return delay;
}

double end_to_end_success(std::span<const double> erasures)
{
    double p = 1.0;
    for (double e : erasures) {
        if (!(e >= 0.0 && e <= 1.0))
            throw std::invalid_argument("erasure probability must lie in [0, 1]");
        p *= 1.0 - e;
    }
    return p;
}

double upper_incomplete_gamma(double s, double x)
{
    return boost::math::tgamma(s, x);
}

double expected_WY(const TandemModel& model)
{
    require_stable(model.arrival_rate, model.service_rate);
    if (model.hops < 1)
        throw std::invalid_argument("hops must be >= 1");
    return expected_wy_impl(model.hops, model.arrival_rate, model.service_rate);
}

double expected_TY(const TandemModel& model)
{
    return expected_WY(model) + model.hops / (model.service_rate * model.arrival_rate);
}

double average_aoi_lossless(double arrival_rate, double expected_ty)
{
    if (!(arrival_rate > 0.0))
        throw AnalyticError("arrival rate must be > 0");
    return arrival_rate * (expected_ty + 1.0 / (arrival_rate * arrival_rate));
}

double average_aoi_lossless(const TandemModel& model)
{
    return average_aoi_lossless(model.arrival_rate, expected_TY(model));
}

AoiDecomposition aoi_decomposition(const TandemModel& model)
{
    require_stable(model.arrival_rate, model.service_rate);
    require_erasures(model);

    AoiDecomposition d;
    d.success = end_to_end_success(model.erasures);
    if (!(d.success > 0.0))
        throw AnalyticError("every update is lost: average age is infinite");

    const double lambda = model.arrival_rate;
    d.e_y = 1.0 / lambda;
    d.e_y2 = 2.0 / (lambda * lambda);
    const double equivalent = d.success == 1.0 ? lambda : equivalent_arrival_rate(model);
    d.e_wy = expected_wy_impl(model.hops, equivalent, model.service_rate);
    d.e_ty = d.e_wy + model.hops / (model.service_rate * lambda);
    // T_i and the interarrival before the previous update treated as independent.
    d.e_ty_prev = mean_network_delay(model) * d.e_y;
    return d;
}

double average_aoi_with_errors(const TandemModel& model)
{
    const AoiDecomposition d = aoi_decomposition(model);
    const double p = d.success;
    const double q = 1.0 - p;

    // Lost updates e before each delivery: E[e] = q/p, E[C(e+1, 2)] = q/p^2.
    const double mean_lost = q / p;
    const double mean_pairs = q / (p * p);

    const double area = d.e_ty + mean_lost * d.e_ty_prev + 0.5 * (mean_lost + 1.0) * d.e_y2
                        + mean_pairs * d.e_y * d.e_y;
    // Normalised by the rate of delivered updates, p / E[Y].
    return p / d.e_y * area;
}

} // namespace leoiot::backhaul
