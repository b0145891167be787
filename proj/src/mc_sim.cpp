#include "harq_ee/mc_sim.hpp"

#include "harq_ee/error.hpp"
#include "harq_ee/harq_time.hpp"
#include "harq_ee/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace harq_ee {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SimCounts run_chunk(const SimSpec& spec, std::uint64_t chunk, std::uint64_t samples) {
    Rng rng(spec.seed, chunk);
    SimCounts counts;
    counts.success_at.assign(static_cast<std::size_t>(spec.deadline), 0);
    counts.samples = samples;

    const double needed_gain = std::expm1(spec.rate * std::numbers::ln2); // 2^R - 1
    const bool chase = spec.scheme == HarqScheme::ChaseCombining;

    for (std::uint64_t s = 0; s < samples; ++s) {
        double accumulated = 0.0;
        int decoded = 0;
        for (int round = 1; round <= spec.deadline; ++round) {
            const double z = sample_z(spec.model, rng);
            if (decoded != 0) continue;
            if (chase) {
                accumulated += z;
                if (spec.snr * accumulated >= needed_gain) decoded = round;
            } else {
                accumulated += std::log1p(spec.snr * z) / std::numbers::ln2;
                if (accumulated >= spec.rate) decoded = round;
            }
        }
        if (decoded == 0) {
            ++counts.outages;
        } else {
            ++counts.success_at[static_cast<std::size_t>(decoded - 1)];
        }
    }
    return counts;
}

// Delta-method standard error of g(p) for multinomial proportions p with
// gradient entries grad[c]: Var = (sum p g^2 - (sum p g)^2) / n.
double multinomial_stderr(const std::vector<double>& p, const std::vector<double>& grad, double n) {
    double mean = 0.0;
    double square = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        mean += p[c] * grad[c];
        square += p[c] * grad[c] * grad[c];
    }
    return std::sqrt(std::max(0.0, square - mean * mean) / n);
}

} // namespace

std::string_view to_string(HarqScheme scheme) {
    return scheme == HarqScheme::ChaseCombining ? "cc" : "ir";
}

void SimSpec::validate() const {
    model.validate();
    detail::require(snr >= 0.0 && std::isfinite(snr), "snr must be nonnegative");
    detail::require(rate >= 0.0 && std::isfinite(rate), "transmission rate must be nonnegative");
    detail::require(deadline >= 1, "deadline M must be at least 1");
    detail::require(n_samples >= 1, "sample count must be positive");
    detail::require(chunk_size >= 1, "chunk size must be positive");
    if (theta) detail::require(*theta >= 0.0, "QoS exponent must be nonnegative");
}

SimCounts& SimCounts::operator+=(const SimCounts& other) {
    if (success_at.size() < other.success_at.size()) success_at.resize(other.success_at.size(), 0);
    for (std::size_t i = 0; i < other.success_at.size(); ++i) success_at[i] += other.success_at[i];
    outages += other.outages;
    samples += other.samples;
    return *this;
}

double sample_z(const FadingModel& model, Rng& rng) {
    if (model.family == FadingFamily::Rayleigh) {
        return model.mean_power * rng.exponential();
    }
    return model.scale() * rng.gamma(model.m_shape);
}

SimResult simulate(const SimSpec& spec) {
    spec.validate();
    const std::uint64_t chunks = (spec.n_samples + spec.chunk_size - 1) / spec.chunk_size;
    std::vector<SimCounts> partial(static_cast<std::size_t>(chunks));
    parallel_for(partial.size(), spec.threads, [&](std::size_t c) {
        const std::uint64_t begin = c * spec.chunk_size;
        const std::uint64_t size = std::min(spec.chunk_size, spec.n_samples - begin);
        partial[c] = run_chunk(spec, c, size);
    });

    SimCounts total;
    total.success_at.assign(static_cast<std::size_t>(spec.deadline), 0);
    for (const auto& p : partial) total += p;
    return summarize(total, spec.rate, spec.theta);
}

SimResult summarize(const SimCounts& counts, double rate, std::optional<double> theta) {
    detail::require(counts.samples >= 1, "no samples to summarize");
    const std::size_t deadline = counts.success_at.size();
    const double n = static_cast<double>(counts.samples);

    SimResult out;
    out.counts = counts;
    out.empirical_pmf.resize(deadline);
    out.pmf_stderr.resize(deadline);
    for (std::size_t i = 0; i < deadline; ++i) {
        const double p = static_cast<double>(counts.success_at[i]) / n;
        out.empirical_pmf[i] = p;
        out.pmf_stderr[i] = std::sqrt(p * (1.0 - p) / n);
    }
    out.outage_rate = static_cast<double>(counts.outages) / n;
    out.outage_stderr = std::sqrt(out.outage_rate * (1.0 - out.outage_rate) / n);

    if (counts.outages == counts.samples) {
        out.mu_hat = std::numeric_limits<double>::infinity();
        out.sigma2_hat = std::numeric_limits<double>::infinity();
        out.mu_stderr = out.sigma2_stderr = kNaN;
        if (theta) {
            out.r_avg_hat = 0.0;
            out.r_avg_stderr = 0.0;
        }
        return out;
    }

    const TimeMoments moments = moments_total_time(out.empirical_pmf, out.outage_rate);
    out.mu_hat = moments.mu;
    out.sigma2_hat = moments.sigma2;

    // Gradients of mu and E{T-hat^2} with respect to each category proportion;
    // the last category is the outage cell.
    const double eps = out.outage_rate;
    const double keep = 1.0 - eps;
    const double m = static_cast<double>(deadline);
    double first = 0.0;
    double second = 0.0;
    std::vector<double> probs(deadline + 1);
    for (std::size_t i = 0; i < deadline; ++i) {
        const double t = static_cast<double>(i + 1);
        first += t * out.empirical_pmf[i];
        second += t * t * out.empirical_pmf[i];
        probs[i] = out.empirical_pmf[i];
    }
    probs[deadline] = eps;

    std::vector<double> grad_mu(deadline + 1);
    std::vector<double> grad_second(deadline + 1);
    for (std::size_t i = 0; i < deadline; ++i) {
        const double t = static_cast<double>(i + 1);
        grad_mu[i] = t / keep;
        grad_second[i] = t * t / keep + 2.0 * m * eps * t / (keep * keep);
    }
    grad_mu[deadline] = (m + out.mu_hat) / keep;
    grad_second[deadline] = second / (keep * keep) + 2.0 * m * first * (1.0 + eps) / (keep * keep * keep) +
                            m * m * (1.0 + 3.0 * eps) / (keep * keep * keep);

    std::vector<double> grad_sigma2(deadline + 1);
    for (std::size_t c = 0; c <= deadline; ++c) {
        grad_sigma2[c] = grad_second[c] - 2.0 * out.mu_hat * grad_mu[c];
    }
    out.mu_stderr = multinomial_stderr(probs, grad_mu, n);
    out.sigma2_stderr = multinomial_stderr(probs, grad_sigma2, n);

    if (theta) {
        const double mu = out.mu_hat;
        const double s2 = out.sigma2_hat;
        const double value = throughput_small_theta(rate, mu, s2, *theta);
        out.r_avg_hat = value;
        std::vector<double> grad_r(deadline + 1, 0.0);
        if (value > 0.0) {
            const double d_mu = -rate / (mu * mu) + 3.0 * rate * rate * s2 * *theta / (2.0 * mu * mu * mu * mu);
            const double d_s2 = -rate * rate * *theta / (2.0 * mu * mu * mu);
            for (std::size_t c = 0; c <= deadline; ++c) {
                grad_r[c] = d_mu * grad_mu[c] + d_s2 * grad_sigma2[c];
            }
        }
        out.r_avg_stderr = multinomial_stderr(probs, grad_r, n);
    }
    return out;
}

} // namespace harq_ee
