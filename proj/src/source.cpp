#include "harq_ee/source.hpp"

#include "harq_ee/error.hpp"

#include <cmath>

namespace harq_ee {

namespace {

// (y + sqrt(y^2 + 4 k)) / 2 for k >= 0, without cancellation when y << 0.
double dominant_root(double y, double k) {
    const double radical = std::sqrt(y * y + 4.0 * k);
    if (y >= 0.0) return 0.5 * (y + radical);
    return 2.0 * k / (radical - y);
}

// Root of the squared two-state balance equation for fluid-type sources:
// x = c (c + alpha + beta) / (c + alpha), with x = theta r (fluid) or (e^theta - 1) nu (MMPS).
double fluid_exponent(const SourceModel& source, double c) {
    const double x = c * (c + source.alpha + source.beta) / (c + source.alpha);
    if (2.0 * c - x + source.alpha + source.beta < 0.0) {
        throw NumericError("fluid balance inversion produced a spurious root");
    }
    return x;
}

} // namespace

std::string_view to_string(SourceKind kind) {
    switch (kind) {
    case SourceKind::Constant: return "constant";
    case SourceKind::DiscreteMarkov: return "dmarkov";
    case SourceKind::FluidMarkov: return "fluid";
    case SourceKind::Mmps: return "mmps";
    }
    return "unknown";
}

SourceModel SourceModel::constant() {
    return SourceModel{};
}

SourceModel SourceModel::discrete_markov(double p11, double p22) {
    SourceModel source{SourceKind::DiscreteMarkov, p11, p22, 1.0, 1.0};
    source.validate();
    return source;
}

SourceModel SourceModel::fluid(double alpha, double beta) {
    SourceModel source{SourceKind::FluidMarkov, 0.0, 1.0, alpha, beta};
    source.validate();
    return source;
}

SourceModel SourceModel::mmps(double alpha, double beta) {
    SourceModel source{SourceKind::Mmps, 0.0, 1.0, alpha, beta};
    source.validate();
    return source;
}

double SourceModel::p_on() const {
    switch (kind) {
    case SourceKind::Constant: return 1.0;
    case SourceKind::DiscreteMarkov: return (1.0 - p11) / (2.0 - p11 - p22);
    case SourceKind::FluidMarkov:
    case SourceKind::Mmps: return alpha / (alpha + beta);
    }
    return 1.0;
}

void SourceModel::validate() const {
    switch (kind) {
    case SourceKind::Constant: return;
    case SourceKind::DiscreteMarkov:
        detail::require(p11 >= 0.0 && p11 < 1.0, "p11 must lie in [0, 1); p11 = 1 never turns ON");
        detail::require(p22 >= 0.0 && p22 <= 1.0, "p22 must lie in [0, 1]");
        return;
    case SourceKind::FluidMarkov:
    case SourceKind::Mmps:
        detail::require(alpha > 0.0 && std::isfinite(alpha), "alpha must be positive");
        detail::require(beta >= 0.0 && std::isfinite(beta), "beta must be nonnegative");
        return;
    }
}

double lmgf_arrival(const SourceModel& source, double theta, double rate_param) {
    source.validate();
    detail::require(theta > 0.0, "QoS exponent must be positive");
    detail::require(rate_param >= 0.0, "arrival rate parameter must be nonnegative");

    switch (source.kind) {
    case SourceKind::Constant: return rate_param * theta;
    case SourceKind::DiscreteMarkov: {
        const double w = std::exp(rate_param * theta);
        const double b = source.p11 + source.p22 * w;
        const double disc = b * b - 4.0 * (source.p11 + source.p22 - 1.0) * w;
        return std::log(0.5 * (b + std::sqrt(disc)));
    }
    case SourceKind::FluidMarkov: {
        const double x = theta * rate_param;
        return dominant_root(x - source.alpha - source.beta, source.alpha * x);
    }
    case SourceKind::Mmps: {
        const double x = std::expm1(theta) * rate_param;
        return dominant_root(x - source.alpha - source.beta, source.alpha * x);
    }
    }
    return 0.0;
}

SolvedArrival solve_arrival(const SourceModel& source, double effective_capacity, double theta) {
    source.validate();
    detail::require(effective_capacity >= 0.0, "effective capacity must be nonnegative");
    detail::require(theta > 0.0, "QoS exponent must be positive");

    SolvedArrival out;
    if (effective_capacity == 0.0) return out;
    const double c = theta * effective_capacity;

    switch (source.kind) {
    case SourceKind::Constant:
        out.rate_param = effective_capacity;
        break;
    case SourceKind::DiscreteMarkov: {
        // Squaring the radical of the spectral-radius balance gives
        // s = u (u - p11) / (u p22 - p11 - p22 + 1), u = e^{theta C_E};
        // s - 1 is formed directly to keep precision for small theta.
        const double p11 = source.p11;
        const double p22 = source.p22;
        const double u_minus_one = std::expm1(c);
        const double u = 1.0 + u_minus_one;
        const double s_minus_one = u_minus_one * (u + 1.0 - p11 - p22) / (p22 * u_minus_one + 1.0 - p11);
        const double s = 1.0 + s_minus_one;
        if (!(s > 0.0)) throw NumericError("discrete Markov balance has no positive root");
        if (2.0 * u - p11 - p22 * s < -1e-12 * u) {
            throw NumericError("discrete Markov balance inversion produced a spurious root");
        }
        out.rate_param = std::log1p(s_minus_one) / theta;
        break;
    }
    case SourceKind::FluidMarkov:
        out.rate_param = fluid_exponent(source, c) / theta;
        break;
    case SourceKind::Mmps:
        out.rate_param = fluid_exponent(source, c) / std::expm1(theta);
        break;
    }
    out.r_avg = out.rate_param * source.p_on();
    return out;
}

double solve_throughput(const SourceModel& source, double effective_capacity, double theta) {
    return solve_arrival(source, effective_capacity, theta).r_avg;
}

double discrete_zeta(double p11, double p22) {
    detail::require(p11 >= 0.0 && p11 < 1.0, "zeta is undefined for p11 = 1");
    detail::require(p22 >= 0.0 && p22 <= 1.0, "p22 must lie in [0, 1]");
    return (1.0 - p22) * (p11 + p22) / ((1.0 - p11) * (2.0 - p11 - p22));
}

double burstiness_penalty(const SourceModel& source, double theta) {
    source.validate();
    switch (source.kind) {
    case SourceKind::Constant: return 0.0;
    case SourceKind::DiscreteMarkov: return theta * discrete_zeta(source.p11, source.p22);
    case SourceKind::FluidMarkov:
    case SourceKind::Mmps:
        return 2.0 * theta * source.beta / (source.alpha * (source.alpha + source.beta));
    }
    return 0.0;
}

double poisson_factor(const SourceModel& source, double theta) {
    if (source.kind != SourceKind::Mmps || theta == 0.0) return 1.0;
    return theta / std::expm1(theta);
}

std::vector<double> theta_zero_limit_check(const SourceModel& source, double effective_capacity,
                                           std::span<const double> thetas) {
    std::vector<double> residuals;
    residuals.reserve(thetas.size());
    for (const double theta : thetas) {
        residuals.push_back(std::abs(solve_throughput(source, effective_capacity, theta) - effective_capacity));
    }
    return residuals;
}

} // namespace harq_ee
