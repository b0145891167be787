#include "harq_ee/ee_metrics.hpp"

#include "harq_ee/error.hpp"
#include "harq_ee/harq_time.hpp"
#include "harq_ee/optimize.hpp"
#include "harq_ee/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace harq_ee {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Outage range searched when the outage itself is the free variable.
constexpr double kMinSearchOutage = 1e-9;
constexpr double kMaxSearchOutage = 1.0 - 1e-9;

void require_snr(double snr) {
    detail::require(snr >= 0.0 && std::isfinite(snr), "snr must be nonnegative and finite");
}

// r_avg for a rate whose per-message statistics are already known.
double arrival_throughput(const LinkSetup& link, const TransmissionStats& stats, double rate) {
    if (!(stats.outage < 1.0)) return 0.0;
    const TimeMoments moments = moments_total_time(stats);
    const double capacity = throughput_small_theta(rate, moments.mu, moments.sigma2, link.theta);
    return solve_throughput(link.source, capacity, link.theta);
}

OptimalRatePoint evaluate_rate(const LinkSetup& link, double snr, double rate) {
    OptimalRatePoint point;
    point.rate = rate;
    const double threshold = std::expm1(rate * kLn2) / snr;
    const TransmissionStats stats = pmf_from_threshold(link.fading, link.deadline, threshold);
    point.outage = stats.outage;
    if (stats.outage < 1.0) {
        const TimeMoments moments = moments_total_time(stats);
        point.effective_capacity = throughput_small_theta(rate, moments.mu, moments.sigma2, link.theta);
        point.r_avg = solve_throughput(link.source, point.effective_capacity, link.theta);
    }
    return point;
}

OptimalRatePoint evaluate_outage(const LinkSetup& link, double snr, double eps) {
    TransmissionStats stats = transmission_stats(link.fading, link.deadline, eps);
    OptimalRatePoint point;
    point.outage = eps;
    point.rate = rate_for_threshold(stats.threshold, snr);
    point.effective_capacity = throughput_small_theta(point.rate, stats.mu, stats.sigma2, link.theta);
    point.r_avg = solve_throughput(link.source, point.effective_capacity, link.theta);
    return point;
}

} // namespace

void LinkSetup::validate() const {
    source.validate();
    fading.validate();
    detail::require(deadline >= 1, "deadline M must be at least 1");
    detail::require(theta > 0.0 && std::isfinite(theta), "QoS exponent must be positive");
}

std::string_view to_string(RateRegime regime) {
    return regime == RateRegime::FixedOutage ? "fixed" : "optimal";
}

double to_db(double ratio) {
    return 10.0 * std::log10(ratio);
}

double EeResult::eb_min_db() const {
    return to_db(eb_min);
}

EeResult ee_fixed_outage(const LinkSetup& link, double eps) {
    link.validate();
    const TransmissionStats stats = transmission_stats(link.fading, link.deadline, eps);
    const double mu = stats.mu;
    const double departure = (stats.sigma2 * link.theta + mu * mu * kLn2) / mu;
    const double poisson = poisson_factor(link.source, link.theta);

    EeResult out;
    out.regime = RateRegime::FixedOutage;
    out.eb_min = mu * kLn2 / stats.threshold / poisson;
    out.s0 = poisson * 2.0 * kLn2 / (departure + burstiness_penalty(link.source, link.theta));
    return out;
}

EeResult ee_optimal_rate(const LinkSetup& link) {
    link.validate();
    // At vanishing snr the optimal outage minimizes mu(eps) ln2 / F_M^{-1}(eps).
    const auto energy = [&](double eps) {
        const TransmissionStats stats = transmission_stats(link.fading, link.deadline, eps);
        return stats.mu * kLn2 / stats.threshold;
    };
    const Extremum best = minimize_unimodal(energy, kMinSearchOutage, kMaxSearchOutage, 1e-9, 256);

    const TransmissionStats stats = transmission_stats(link.fading, link.deadline, best.argument);
    EeResult out;
    out.regime = RateRegime::OptimalRate;
    out.eps_star = best.argument;
    out.a_coeff = stats.threshold / kLn2;
    out.eb_min = stats.mu / out.a_coeff / poisson_factor(link.source, link.theta);
    out.s0 = std::numeric_limits<double>::quiet_NaN();
    return out;
}

OptimalRatePoint optimal_rate_at_snr(const LinkSetup& link, double snr) {
    link.validate();
    require_snr(snr);
    detail::require(snr > 0.0, "optimal rate needs a positive snr");

    const double threshold_cap = sum_quantile(link.fading, link.deadline, kMaxSearchOutage);
    const double rate_cap = rate_for_threshold(threshold_cap, snr);
    const Extremum best = maximize_unimodal(
        [&](double rate) { return evaluate_rate(link, snr, rate).r_avg; }, 0.0, rate_cap,
        1e-9 * std::min(1.0, rate_cap), 128);
    return evaluate_rate(link, snr, best.argument);
}

OptimalRatePoint optimal_outage_at_snr(const LinkSetup& link, double snr) {
    link.validate();
    require_snr(snr);
    detail::require(snr > 0.0, "optimal outage needs a positive snr");
    const Extremum best = maximize_unimodal(
        [&](double eps) { return evaluate_outage(link, snr, eps).r_avg; }, kMinSearchOutage,
        kMaxSearchOutage, 1e-9, 256);
    return evaluate_outage(link, snr, best.argument);
}

double throughput_at(const LinkSetup& link, const RatePolicy& policy, double snr) {
    link.validate();
    require_snr(snr);
    if (snr == 0.0) return 0.0;
    if (policy.regime == RateRegime::OptimalRate) return optimal_rate_at_snr(link, snr).r_avg;
    const TransmissionStats stats = transmission_stats(link.fading, link.deadline, policy.eps);
    return arrival_throughput(link, stats, rate_for_threshold(stats.threshold, snr));
}

std::vector<CurvePoint> curve(const LinkSetup& link, const RatePolicy& policy,
                              std::span<const double> snr_grid, unsigned threads) {
    link.validate();
    for (std::size_t i = 0; i < snr_grid.size(); ++i) {
        detail::require(snr_grid[i] > 0.0 && std::isfinite(snr_grid[i]), "snr grid must be positive");
        detail::require(i == 0 || snr_grid[i] > snr_grid[i - 1], "snr grid must be ascending");
    }

    TransmissionStats fixed_stats;
    if (policy.regime == RateRegime::FixedOutage) {
        fixed_stats = transmission_stats(link.fading, link.deadline, policy.eps);
    }

    std::vector<CurvePoint> points(snr_grid.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        const double snr = snr_grid[i];
        CurvePoint& p = points[i];
        p.snr = snr;
        if (policy.regime == RateRegime::OptimalRate) {
            p.r_avg = optimal_rate_at_snr(link, snr).r_avg;
        } else {
            p.r_avg = arrival_throughput(link, fixed_stats, rate_for_threshold(fixed_stats.threshold, snr));
        }
        p.eb_db = p.r_avg > 0.0 ? to_db(snr / p.r_avg) : std::numeric_limits<double>::infinity();
    });
    return points;
}

SlopeEstimate slope_numeric(std::span<const CurvePoint> points) {
    std::vector<CurvePoint> usable;
    for (const auto& p : points) {
        if (p.snr > 0.0 && p.r_avg > 0.0) usable.push_back(p);
    }
    if (usable.size() < 3) {
        throw NumericError("slope estimate needs at least three points with positive throughput");
    }
    std::sort(usable.begin(), usable.end(), [](const auto& a, const auto& b) { return a.snr < b.snr; });
    // Higher-degree stencils amplify rounding; the four lowest points suffice.
    if (usable.size() > 4) usable.resize(4);
    for (std::size_t i = 1; i < usable.size(); ++i) {
        if (usable[i].snr - usable[i - 1].snr <= 1e-6 * usable[i].snr) {
            throw NumericError("slope stencil has (nearly) coincident snr values");
        }
    }

    // g(snr) = r_avg / snr = r'(0) + r''(0)/2 snr + ...; interpolate g and read off
    // the value and derivative of the interpolating polynomial at snr = 0.
    const std::size_t n = usable.size();
    double value = 0.0;
    double derivative = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double si = usable[i].snr;
        const double gi = usable[i].r_avg / si;
        double basis = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) basis *= -usable[j].snr / (si - usable[j].snr);
        }
        double basis_derivative = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) continue;
            double term = 1.0 / (si - usable[k].snr);
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && j != k) term *= -usable[j].snr / (si - usable[j].snr);
            }
            basis_derivative += term;
        }
        value += gi * basis;
        derivative += gi * basis_derivative;
    }

    SlopeEstimate out;
    out.first_derivative = value;
    out.second_derivative = 2.0 * derivative;
    if (!(value > 0.0) || !(out.second_derivative < 0.0)) {
        throw NumericError("throughput curve is not concave at zero snr; stencil ill-conditioned");
    }
    out.eb_min = 1.0 / value;
    out.s0 = -2.0 * value * value / out.second_derivative * kLn2;
    return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    detail::require(lo > 0.0 && hi >= lo, "log grid needs 0 < lo <= hi");
    detail::require(n >= 1, "log grid needs at least one point");
    std::vector<double> grid(static_cast<std::size_t>(n));
    if (n == 1) {
        grid[0] = lo;
        return grid;
    }
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    grid.back() = hi;
    return grid;
}

} // namespace harq_ee
