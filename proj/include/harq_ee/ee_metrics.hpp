#pragma once

#include "harq_ee/fading.hpp"
#include "harq_ee/source.hpp"

#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace harq_ee {

/// Everything that stays fixed along a throughput curve.
struct LinkSetup {
    SourceModel source{};
    FadingModel fading{};
    int deadline = 1;   ///< M
    double theta = 0.1; ///< QoS exponent per block

    void validate() const;
};

enum class RateRegime { FixedOutage, OptimalRate };

std::string_view to_string(RateRegime regime);

/// How the transmission rate is chosen at each snr.
struct RatePolicy {
    RateRegime regime = RateRegime::FixedOutage;
    double eps = 0.1; ///< outage target, FixedOutage only

    static RatePolicy fixed(double eps) { return {RateRegime::FixedOutage, eps}; }
    static RatePolicy optimal() { return {RateRegime::OptimalRate, 0.0}; }
};

struct EeResult {
    double eb_min = 0.0; ///< minimum energy per bit, linear
    double s0 = 0.0;     ///< wideband slope, bits/s/Hz per 3 dB
    RateRegime regime = RateRegime::FixedOutage;
    double eps_star = std::numeric_limits<double>::quiet_NaN(); ///< optimal regime only
    double a_coeff = std::numeric_limits<double>::quiet_NaN();  ///< dR*/dsnr at 0, optimal regime only

    double eb_min_db() const;
};

struct CurvePoint {
    double snr = 0.0;
    double r_avg = 0.0;
    double eb_db = std::numeric_limits<double>::infinity(); ///< +inf when r_avg = 0
};

struct OptimalRatePoint {
    double rate = 0.0;   ///< R*(snr)
    double outage = 0.0; ///< eps(snr) = F_M((2^R* - 1) / snr)
    double effective_capacity = 0.0;
    double r_avg = 0.0;
};

struct SlopeEstimate {
    double eb_min = 0.0;
    double s0 = 0.0;
    double first_derivative = 0.0;  ///< d r_avg / d snr at 0
    double second_derivative = 0.0; ///< d^2 r_avg / d snr^2 at 0
};

double to_db(double ratio);

/// Closed-form minimum energy per bit and wideband slope with a fixed outage target.
EeResult ee_fixed_outage(const LinkSetup& link, double eps);

/// Minimum energy per bit with the throughput-optimal rate. S0 has no closed form
/// in this regime and is reported as NaN; see slope_numeric.
EeResult ee_optimal_rate(const LinkSetup& link);

/// Throughput-maximizing rate at a given snr (search over R).
OptimalRatePoint optimal_rate_at_snr(const LinkSetup& link, double snr);

/// Same optimum searched over the outage probability instead of the rate.
OptimalRatePoint optimal_outage_at_snr(const LinkSetup& link, double snr);

/// r_avg at one snr under a rate policy.
double throughput_at(const LinkSetup& link, const RatePolicy& policy, double snr);

/// Throughput-vs-energy-per-bit samples; output order follows snr_grid.
std::vector<CurvePoint> curve(const LinkSetup& link, const RatePolicy& policy,
                              std::span<const double> snr_grid, unsigned threads = 1);

/// Eb_min and S0 from low-snr curve samples by polynomial extrapolation of
/// r_avg / snr to snr = 0. Needs at least three distinct points with positive
/// throughput; throws NumericError on an ill-conditioned stencil.
SlopeEstimate slope_numeric(std::span<const CurvePoint> points);

/// n points spaced logarithmically from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

} // namespace harq_ee
