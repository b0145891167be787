#include "harq_ee/harq_time.hpp"

#include "harq_ee/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace harq_ee {

namespace {

void require_deadline(int deadline) {
    detail::require(deadline >= 1, "deadline M must be at least 1");
}

void require_outage(double eps) {
    detail::require(eps > 0.0 && eps < 1.0, "outage probability must lie in (0, 1)");
}

} // namespace

TransmissionStats pmf_from_threshold(const FadingModel& model, int deadline, double threshold) {
    require_deadline(deadline);
    detail::require(threshold >= 0.0, "decoding threshold must be nonnegative");

    TransmissionStats stats;
    stats.threshold = threshold;
    stats.pmf.resize(static_cast<std::size_t>(deadline));
    double previous = sum_cdf(model, 0, threshold);
    for (int t = 1; t <= deadline; ++t) {
        const double current = sum_cdf(model, t, threshold);
        stats.pmf[static_cast<std::size_t>(t - 1)] = std::max(0.0, previous - current);
        previous = current;
    }
    stats.outage = previous;
    return stats;
}

TransmissionStats pmf_transmission_time(const FadingModel& model, int deadline, double eps) {
    require_deadline(deadline);
    require_outage(eps);
    TransmissionStats stats = pmf_from_threshold(model, deadline, sum_quantile(model, deadline, eps));
    stats.outage = eps;
    return stats;
}

std::vector<double> poisson_pmf(double lambda, int deadline) {
    require_deadline(deadline);
    detail::require(lambda >= 0.0, "Poisson intensity must be nonnegative");
    std::vector<double> pmf(static_cast<std::size_t>(deadline));
    for (int k = 0; k < deadline; ++k) {
        // lambda^k e^{-lambda} / k!
        const double log_term = (k == 0 ? 0.0 : k * std::log(lambda)) - lambda - std::lgamma(k + 1.0);
        pmf[static_cast<std::size_t>(k)] = (lambda == 0.0 && k > 0) ? 0.0 : std::exp(log_term);
    }
    return pmf;
}

TimeMoments moments_total_time(std::span<const double> pmf, double eps) {
    detail::require(!pmf.empty(), "pmf must cover at least one round");
    detail::require(eps >= 0.0 && eps < 1.0, "outage probability must lie in [0, 1)");

    double first = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        const double t = static_cast<double>(i + 1);
        first += t * pmf[i];
        second += t * t * pmf[i];
    }
    const double m = static_cast<double>(pmf.size());
    const double keep = 1.0 - eps;

    TimeMoments out;
    out.mu = first / keep + m * eps / keep;
    const double second_total = second / keep + 2.0 * m * eps * first / (keep * keep) +
                                m * m * eps * (1.0 + eps) / (keep * keep);
    out.sigma2 = std::max(0.0, second_total - out.mu * out.mu);
    return out;
}

TimeMoments moments_total_time(const TransmissionStats& stats) {
    return moments_total_time(stats.pmf, stats.outage);
}

TimeMoments moments_rayleigh_poisson(double lambda, int deadline, double eps) {
    require_outage(eps);
    const std::vector<double> pmf = poisson_pmf(lambda, deadline);
    double first = 0.0;
    double second = 0.0;
    for (int t = 1; t <= deadline; ++t) {
        first += t * pmf[static_cast<std::size_t>(t - 1)];
        second += static_cast<double>(t) * t * pmf[static_cast<std::size_t>(t - 1)];
    }
    const double keep = 1.0 - eps;
    const double m = deadline;
    TimeMoments out;
    out.mu = first / keep + m * eps / keep;
    out.sigma2 = second / keep - first * first / (keep * keep) + m * m * eps / (keep * keep);
    return out;
}

TransmissionStats transmission_stats(const FadingModel& model, int deadline, double eps) {
    TransmissionStats stats = pmf_transmission_time(model, deadline, eps);
    const TimeMoments moments = moments_total_time(stats);
    stats.mu = moments.mu;
    stats.sigma2 = moments.sigma2;
    return stats;
}

double throughput_small_theta(double rate, double mu, double sigma2, double theta) {
    detail::require(rate >= 0.0, "transmission rate must be nonnegative");
    detail::require(theta >= 0.0, "QoS exponent must be nonnegative");
    detail::require(mu > 0.0, "mean transmission time must be positive");
    detail::require(sigma2 >= 0.0, "transmission time variance must be nonnegative");
    const double value = rate / mu - rate * rate * sigma2 * theta / (2.0 * mu * mu * mu);
    return std::max(0.0, value);
}

double rate_for_threshold(double threshold, double snr) {
    detail::require(threshold >= 0.0, "decoding threshold must be nonnegative");
    detail::require(snr >= 0.0, "snr must be nonnegative");
    return std::log1p(threshold * snr) / std::numbers::ln2;
}

double fixed_outage_throughput(const FadingModel& model, int deadline, double eps, double theta,
                               double snr) {
    detail::require(snr >= 0.0, "snr must be nonnegative");
    const TransmissionStats stats = transmission_stats(model, deadline, eps);
    return throughput_small_theta(rate_for_threshold(stats.threshold, snr), stats.mu, stats.sigma2,
                                  theta);
}

} // namespace harq_ee
