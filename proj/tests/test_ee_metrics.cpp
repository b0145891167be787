#include "oracles.hpp"

#include "harq_ee/ee_metrics.hpp"
#include "harq_ee/error.hpp"
#include "harq_ee/harq_time.hpp"
#include "harq_ee/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace harq_ee;

namespace {

LinkSetup rayleigh_link(int deadline, SourceModel source = SourceModel::constant(), double theta = 0.1) {
    return {source, FadingModel::rayleigh(), deadline, theta};
}

} // namespace

TEST(EnergyEfficiency, SingleRoundConstantSourceExample) {
    const EeResult r = ee_fixed_outage(rayleigh_link(1), 0.1);
    const double expected = std::numbers::ln2 / (0.9 * -std::log(0.9));
    EXPECT_NEAR(r.eb_min, expected, 1e-12);
    EXPECT_NEAR(r.eb_min, 7.30979275, 1e-7);
    EXPECT_NEAR(r.eb_min_db(), 8.6390506, 1e-6);
}

TEST(EnergyEfficiency, EbMinIndependentOfThetaExceptForMmps) {
    for (const auto& s : {SourceModel::constant(), SourceModel::discrete_markov(0.2, 0.6), SourceModel::fluid(1.0, 1.0)}) {
        const double a = ee_fixed_outage(rayleigh_link(3, s, 0.01), 0.1).eb_min;
        const double b = ee_fixed_outage(rayleigh_link(3, s, 1.0), 0.1).eb_min;
        EXPECT_NEAR(a, b, 1e-12 * a);
    }
    const double a = ee_fixed_outage(rayleigh_link(3, SourceModel::mmps(1.0, 1.0), 0.01), 0.1).eb_min;
    const double b = ee_fixed_outage(rayleigh_link(3, SourceModel::mmps(1.0, 1.0), 1.0), 0.1).eb_min;
    EXPECT_GT(b, a);
}

TEST(EnergyEfficiency, SlopeDecreasesWithTheta) {
    double prev = INFINITY;
    for (double theta : {0.01, 0.1, 0.5, 1.0}) {
        const double s0 = ee_fixed_outage(rayleigh_link(3, SourceModel::discrete_markov(0.5, 0.5), theta), 0.1).s0;
        EXPECT_LT(s0, prev);
        prev = s0;
    }
}

TEST(EnergyEfficiency, DeadlineImprovesBothMetrics) {
    for (const auto& fading : {FadingModel::rayleigh(), FadingModel::nakagami(2.0)}) {
        double eb = INFINITY;
        double s0 = INFINITY;
        for (int m : {1, 3, 6, 9}) {
            const EeResult r = ee_fixed_outage({SourceModel::constant(), fading, m, 0.1}, 0.1);
            EXPECT_LT(r.eb_min, eb);
            EXPECT_LT(r.s0, s0);
            eb = r.eb_min;
            s0 = r.s0;
        }
    }
}

TEST(EnergyEfficiency, EbUnimodalInOutage) {
    for (int m : {1, 3, 6}) {
        const LinkSetup link = rayleigh_link(m);
        int turns = 0;
        double prev = ee_fixed_outage(link, 0.01).eb_min;
        bool falling = true;
        for (double eps = 0.02; eps < 0.96; eps += 0.01) {
            const double eb = ee_fixed_outage(link, eps).eb_min;
            if (falling && eb > prev) {
                falling = false;
                ++turns;
            } else if (!falling && eb < prev) {
                ++turns;
            }
            prev = eb;
        }
        EXPECT_EQ(turns, 1) << "M=" << m;
    }
}

TEST(EnergyEfficiency, OptimalOutageMatchesDenseGrid) {
    for (int m : {1, 3}) {
        const LinkSetup link = rayleigh_link(m);
        const EeResult best = ee_optimal_rate(link);
        double grid_min = INFINITY;
        for (int i = 1; i < 100'000; ++i) {
            const double eps = i / 100'000.0;
            const TransmissionStats s = transmission_stats(link.fading, m, eps);
            grid_min = std::min(grid_min, s.mu * std::numbers::ln2 / s.threshold);
        }
        EXPECT_LE(best.eb_min, grid_min * (1.0 + 1e-12));
        EXPECT_NEAR(best.eb_min, grid_min, 1e-6 * grid_min);
    }
}

TEST(EnergyEfficiency, SingleRoundOptimumIsAnalytic) {
    const EeResult best = ee_optimal_rate(rayleigh_link(1));
    EXPECT_NEAR(best.eps_star, 1.0 - std::exp(-1.0), 1e-6);
    EXPECT_NEAR(best.eb_min, std::numbers::e * std::numbers::ln2, 1e-9);
    EXPECT_NEAR(best.a_coeff, 1.0 / std::numbers::ln2, 1e-6);
}

TEST(EnergyEfficiency, CurveApproachesClosedFormAtLowSnr) {
    for (const auto& s : {SourceModel::constant(), SourceModel::discrete_markov(0.7, 0.4), SourceModel::mmps(0.5, 0.5)}) {
        const LinkSetup link = rayleigh_link(3, s);
        const std::vector<double> grid = log_grid(1e-4, 10.0, 21);
        const auto points = curve(link, RatePolicy::fixed(0.1), grid);
        EXPECT_NEAR(points.front().eb_db, ee_fixed_outage(link, 0.1).eb_min_db(), 0.05);
        for (std::size_t i = 1; i < points.size(); ++i) {
            EXPECT_GE(points[i].eb_db, points[i - 1].eb_db - 1e-9);
            EXPECT_GT(points[i].r_avg, points[i - 1].r_avg);
        }
    }
}

TEST(EnergyEfficiency, CurveIsThreadCountInvariant) {
    const LinkSetup link = rayleigh_link(2, SourceModel::fluid(1.0, 1.0));
    const std::vector<double> grid = log_grid(1e-2, 1e2, 9);
    const auto a = curve(link, RatePolicy::optimal(), grid, 1);
    const auto b = curve(link, RatePolicy::optimal(), grid, 3);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].r_avg, b[i].r_avg);
}

TEST(EnergyEfficiency, OptimalRateBeatsFixedOutage) {
    const LinkSetup link = rayleigh_link(3);
    for (double snr : {0.01, 1.0, 10.0}) {
        const OptimalRatePoint best = optimal_rate_at_snr(link, snr);
        for (double eps : {0.01, 0.1, 0.3, 0.6}) {
            EXPECT_GE(best.r_avg, throughput_at(link, RatePolicy::fixed(eps), snr) * (1.0 - 1e-12));
        }
        double grid_best = 0.0;
        const double cap = best.rate * 3.0;
        for (int i = 1; i <= 20'000; ++i) {
            const double rate = cap * i / 20'000.0;
            const TransmissionStats s = pmf_from_threshold(link.fading, 3, std::expm1(rate * std::numbers::ln2) / snr);
            if (s.outage >= 1.0) continue;
            const TimeMoments mm = moments_total_time(s);
            grid_best = std::max(grid_best, throughput_small_theta(rate, mm.mu, mm.sigma2, link.theta));
        }
        EXPECT_GE(best.r_avg, grid_best * (1.0 - 1e-9));
        EXPECT_NEAR(best.r_avg, grid_best, 1e-6 * grid_best);
    }
}

TEST(EnergyEfficiency, OptimalOutageAndOptimalRateAgree) {
    const LinkSetup link = rayleigh_link(3);
    const OptimalRatePoint by_rate = optimal_rate_at_snr(link, 2.0);
    const OptimalRatePoint by_outage = optimal_outage_at_snr(link, 2.0);
    EXPECT_NEAR(by_rate.r_avg, by_outage.r_avg, 1e-9);
    EXPECT_NEAR(by_rate.outage, by_outage.outage, 1e-4);
}

TEST(EnergyEfficiency, SlopeEstimateIsExactForQuadraticCurves) {
    const double a = 0.7;
    const double b = -0.2;
    std::vector<CurvePoint> points;
    for (double s : {1e-2, 1e-3, 1e-4}) points.push_back({s, a * s + b * s * s, 0.0});
    const SlopeEstimate est = slope_numeric(points);
    EXPECT_NEAR(est.eb_min, 1.0 / a, 1e-12);
    EXPECT_NEAR(est.s0, -2.0 * a * a / (2.0 * b) * std::numbers::ln2, 1e-9);
}

TEST(EnergyEfficiency, SlopeEstimateRejectsDegenerateInput) {
    std::vector<CurvePoint> points{{1e-3, 1e-3, 0.0}, {1e-2, 0.0, 0.0}};
    EXPECT_THROW(slope_numeric(points), NumericError);
}

TEST(EnergyEfficiency, LogGrid) {
    const auto g = log_grid(1e-4, 10.0, 6);
    ASSERT_EQ(g.size(), 6u);
    EXPECT_DOUBLE_EQ(g.front(), 1e-4);
    EXPECT_DOUBLE_EQ(g.back(), 10.0);
    EXPECT_NEAR(g[1], 1e-3, 1e-15);
    EXPECT_THROW(log_grid(0.0, 1.0, 3), ValidationError);
}

TEST(EnergyEfficiency, RejectsBadGridsAndLinks) {
    const LinkSetup link = rayleigh_link(2);
    const std::vector<double> descending{1.0, 0.1};
    EXPECT_THROW(curve(link, RatePolicy::fixed(0.1), descending), ValidationError);
    LinkSetup bad = link;
    bad.theta = 0.0;
    EXPECT_THROW(ee_fixed_outage(bad, 0.1), ValidationError);
}

TEST(Optimizer, FindsInteriorAndBoundaryExtrema) {
    const Extremum in = maximize_unimodal([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-10);
    EXPECT_NEAR(in.argument, 0.3, 1e-8);
    const Extremum edge = maximize_unimodal([](double x) { return x; }, 0.0, 2.0, 1e-10);
    EXPECT_NEAR(edge.argument, 2.0, 1e-8);
    const Extremum low = minimize_unimodal([](double x) { return std::cosh(x - 1.5); }, -3.0, 3.0, 1e-10);
    EXPECT_NEAR(low.argument, 1.5, 1e-5);
    EXPECT_NEAR(low.value, 1.0, 1e-12);
}

TEST(Optimizer, RejectsMultimodalFunctions) {
    EXPECT_THROW(maximize_unimodal([](double x) { return std::sin(20.0 * x); }, 0.0, 3.0, 1e-9), NumericError);
}
