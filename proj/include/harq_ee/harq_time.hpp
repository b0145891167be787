#pragma once

#include "harq_ee/fading.hpp"

#include <span>
#include <vector>

namespace harq_ee {

/// Per-message HARQ-CC transmission time T (rounds until decoding, at most M)
/// and the moments of the total time T-hat that includes restarts after
/// deadline violations.
struct TransmissionStats {
    std::vector<double> pmf; ///< pmf[t - 1] = Pr{T = t}, t = 1..M
    double outage = 0.0;     ///< Pr{T > M}
    double threshold = 0.0;  ///< accumulated-power decoding threshold F_M^{-1}(outage)
    double mu = 0.0;         ///< E{T-hat}, blocks
    double sigma2 = 0.0;     ///< Var{T-hat}, blocks^2

    int deadline() const { return static_cast<int>(pmf.size()); }
};

struct TimeMoments {
    double mu = 0.0;
    double sigma2 = 0.0;
};

/// Pr{T = t} = F_{t-1}(q) - F_t(q) with q = F_M^{-1}(eps). Moments are left zero;
/// see transmission_stats() for the filled-in version.
TransmissionStats pmf_transmission_time(const FadingModel& model, int deadline, double eps);

/// Same pmf for an explicit accumulated-power threshold q (rate-driven callers).
/// The outage is F_M(q).
TransmissionStats pmf_from_threshold(const FadingModel& model, int deadline, double threshold);

/// Rayleigh-only Poisson form: T - 1 ~ Poisson(q / E{z}), truncated at M.
std::vector<double> poisson_pmf(double lambda, int deadline);

/// Mean and variance of T-hat from the per-message pmf and outage probability.
TimeMoments moments_total_time(std::span<const double> pmf, double eps);
TimeMoments moments_total_time(const TransmissionStats& stats);

/// Moments through the simplified Rayleigh expressions (Poisson pmf with
/// intensity lambda). Used as an independent algebraic route.
TimeMoments moments_rayleigh_poisson(double lambda, int deadline, double eps);

/// pmf plus moments for a fixed outage target.
TransmissionStats transmission_stats(const FadingModel& model, int deadline, double eps);

/// Small-theta effective capacity R/mu - R^2 sigma2 theta / (2 mu^3), clamped at 0.
double throughput_small_theta(double rate, double mu, double sigma2, double theta);

/// Transmission rate log2(1 + threshold * snr) meeting the outage target.
double rate_for_threshold(double threshold, double snr);

/// Effective capacity of HARQ-CC with a fixed outage target.
double fixed_outage_throughput(const FadingModel& model, int deadline, double eps, double theta,
                               double snr);

} // namespace harq_ee
