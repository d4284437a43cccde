#ifndef LEOIOT_BACKHAUL_ANALYTIC_HPP_
#define LEOIOT_BACKHAUL_ANALYTIC_HPP_

#include <span>
#include <stdexcept>
#include <vector>

namespace leoiot::backhaul {

/// Raised when a closed form is evaluated outside its region of validity
/// (unstable load, certain loss, numeric overflow).
class AnalyticError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Homogeneous tandem of M/M/1 FCFS nodes with per-link erasures.
struct TandemModel {
    int hops = 1;
    double arrival_rate = 0.5;   ///< lambda at node 1
    double service_rate = 1.0;   ///< mu at every node
    std::vector<double> erasures; ///< one per link, empty means lossless

    double load() const { return arrival_rate / service_rate; }
    double alpha() const { return service_rate - arrival_rate; }
    /// Mean service time of nodes 1..N-1.
    double service_excluding_last() const { return (hops - 1) / service_rate; }

    static TandemModel lossless(int hops, double arrival_rate, double service_rate);
};

/// Arrival rate reaching node n (1-based) after the erasures of links 1..n-1.
double effective_rate(double arrival_rate, std::span<const double> erasures, int node);

/// Erlang(N, alpha) density of the total system time.
double system_time_pdf(double t, int hops, double alpha);

/// N / (mu - lambda). Throws AnalyticError when lambda >= mu.
double mean_network_delay(int hops, double arrival_rate, double service_rate);

/// Mean delay of delivered packets when each node sees its thinned rate.
double mean_network_delay(const TandemModel& model);

/// Probability that an update survives every link.
double end_to_end_success(std::span<const double> erasures);

/// Upper incomplete gamma Gamma(s, x) = Q(s, x) Gamma(s).
double upper_incomplete_gamma(double s, double x);

/// Incomplete-gamma approximation of E[W Y], with the first N-1 service
/// times replaced by their mean (N-1)/mu.
double expected_WY(const TandemModel& model);

/// E[W Y] + N / (mu lambda).
double expected_TY(const TandemModel& model);

/// lambda * (E[TY] + 1/lambda^2): average age with Poisson input.
double average_aoi_lossless(double arrival_rate, double expected_ty);
double average_aoi_lossless(const TandemModel& model);

/// Average age counting only delivered updates. Each delivered update is
/// preceded by a geometric number of lost ones; the sum over that count is
/// evaluated in closed form. Reduces to the lossless value without erasures.
double average_aoi_with_errors(const TandemModel& model);

/// Per-term breakdown used by average_aoi_with_errors.
struct AoiDecomposition {
    double e_ty = 0.0;
    double e_ty_prev = 0.0;
    double e_y = 0.0;
    double e_y2 = 0.0;
    double e_wy = 0.0;
    double success = 1.0;
};

AoiDecomposition aoi_decomposition(const TandemModel& model);

} // namespace leoiot::backhaul

#endif // LEOIOT_BACKHAUL_ANALYTIC_HPP_
