#include "harq_ee/queue_sim.hpp"

#include "harq_ee/error.hpp"
#include "harq_ee/harq_time.hpp"
#include "harq_ee/mc_sim.hpp"
#include "harq_ee/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace harq_ee {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-block arrival generator for every source kind.
class ArrivalProcess {
public:
    ArrivalProcess(const SourceModel& source, double rate_param, std::uint64_t seed)
        : source_(source), rate_param_(rate_param), rng_(seed, 1) {
        on_ = rng_.bernoulli(source_.p_on());
        if (continuous()) left_ = draw_sojourn();
    }

    double next_block() {
        switch (source_.kind) {
        case SourceKind::Constant: return rate_param_;
        case SourceKind::DiscreteMarkov: {
            const double bits = on_ ? rate_param_ : 0.0;
            const double stay = on_ ? source_.p22 : source_.p11;
            if (!rng_.bernoulli(stay)) on_ = !on_;
            return bits;
        }
        case SourceKind::FluidMarkov:
        case SourceKind::Mmps: return continuous_block();
        }
        return 0.0;
    }

private:
    bool continuous() const {
        return source_.kind == SourceKind::FluidMarkov || source_.kind == SourceKind::Mmps;
    }

    double draw_sojourn() {
        const double leave_rate = on_ ? source_.beta : source_.alpha;
        return leave_rate > 0.0 ? rng_.exponential() / leave_rate : kInf;
    }

    // Exact event-driven sojourns of the two-state chain over one unit block.
    double continuous_block() {
        double budget = 1.0;
        double bits = 0.0;
        while (budget > 0.0) {
            const double span = std::min(left_, budget);
            if (on_) bits += on_arrivals(span);
            budget -= span;
            left_ -= span;
            if (left_ <= 0.0) {
                on_ = !on_;
                left_ = draw_sojourn();
            }
        }
        return bits;
    }

    double on_arrivals(double duration) {
        if (source_.kind == SourceKind::FluidMarkov) return rate_param_ * duration;
        if (rate_param_ <= 0.0) return 0.0;
        // Unit-size Poisson arrivals from exponential gaps.
        double count = 0.0;
        double t = rng_.exponential() / rate_param_;
        while (t < duration) {
            count += 1.0;
            t += rng_.exponential() / rate_param_;
        }
        return count;
    }

    SourceModel source_;
    double rate_param_;
    Rng rng_;
    bool on_ = true;
    double left_ = kInf;
};

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

} // namespace

std::string_view to_string(AbandonPolicy policy) {
    return policy == AbandonPolicy::Requeue ? "requeue" : "drop";
}

void QueueSpec::validate() const {
    link.validate();
    detail::require(snr > 0.0 && std::isfinite(snr), "queue simulation needs a positive snr");
    if (rate) {
        detail::require(*rate > 0.0 && std::isfinite(*rate), "transmission rate must be positive");
    } else {
        detail::require(eps > 0.0 && eps < 1.0, "outage probability must lie in (0, 1)");
    }
    detail::require(load >= 0.0 && load <= 1.0, "load factor must lie in [0, 1]");
    detail::require(n_blocks >= 1, "block count must be positive");
    detail::require(n_thresholds >= 2, "need at least two reported thresholds");
}

QueueTrace simulate_queue(const QueueSpec& spec) {
    spec.validate();
    const LinkSetup& link = spec.link;

    TransmissionStats stats;
    double rate = 0.0;
    if (spec.rate) {
        rate = *spec.rate;
        stats = pmf_from_threshold(link.fading, link.deadline, std::expm1(rate * std::numbers::ln2) / spec.snr);
        const TimeMoments m = moments_total_time(stats);
        stats.mu = m.mu;
        stats.sigma2 = m.sigma2;
    } else {
        stats = transmission_stats(link.fading, link.deadline, spec.eps);
        rate = rate_for_threshold(stats.threshold, spec.snr);
    }

    const double capacity = throughput_small_theta(rate, stats.mu, stats.sigma2, link.theta);
    const SolvedArrival solved = solve_arrival(link.source, capacity, link.theta);

    QueueTrace trace;
    trace.rate = rate;
    trace.arrival_rate_param = spec.load * solved.rate_param;
    trace.mean_arrival = trace.arrival_rate_param * link.source.p_on();
    double rounds_per_attempt = static_cast<double>(link.deadline) * stats.outage;
    for (int t = 1; t <= link.deadline; ++t) rounds_per_attempt += t * stats.pmf[static_cast<std::size_t>(t - 1)];
    trace.mean_service = spec.abandon == AbandonPolicy::Requeue ? rate / stats.mu : rate / rounds_per_attempt;
    if (trace.mean_arrival > 0.0 && trace.mean_arrival >= trace.mean_service) {
        throw NumericError("unstable queue: mean arrivals meet or exceed the mean service rate");
    }

    ArrivalProcess arrivals(link.source, trace.arrival_rate_param, spec.seed);
    Rng channel(spec.seed, 0);
    const double needed_gain = std::expm1(rate * std::numbers::ln2);
    const double bin_width = rate / 64.0;

    std::vector<std::uint64_t> histogram(1024, 0);
    std::uint64_t positive = 0;
    double queue = 0.0;
    double accumulated = 0.0;
    int round = 0;

    for (std::uint64_t block = 0; block < spec.n_blocks; ++block) {
        const double arrived = arrivals.next_block();
        trace.arrived_bits += arrived;

        // The HARQ link runs every block, whether or not the buffer has data.
        bool delivered = false;
        bool abandoned = false;
        accumulated += sample_z(link.fading, channel);
        ++round;
        if (spec.snr * accumulated >= needed_gain) {
            delivered = true;
            ++trace.delivered_messages;
        } else if (round == link.deadline) {
            abandoned = true;
            ++trace.abandoned_messages;
        }
        if (delivered || abandoned) {
            accumulated = 0.0;
            round = 0;
        }
        const double served =
            (delivered || (abandoned && spec.abandon == AbandonPolicy::Drop)) ? rate : 0.0;

        const double before = queue + arrived;
        queue = std::max(0.0, before - served);
        if (delivered) trace.delivered_bits += before - queue;
        if (abandoned) trace.abandoned_bits += before - queue;

        if (queue > 0.0) ++positive;
        const auto bin = static_cast<std::size_t>(queue / bin_width);
        if (bin >= histogram.size()) histogram.resize(std::max(bin + 1, histogram.size() * 2), 0);
        ++histogram[bin];
    }

    const double n = static_cast<double>(spec.n_blocks);
    trace.varsigma_hat = static_cast<double>(positive) / n;

    // ccdf[k] = Pr{Q >= k * bin_width} for k >= 1 (and 1 for k = 0).
    std::size_t last = histogram.size();
    while (last > 0 && histogram[last - 1] == 0) --last;
    std::vector<double> ccdf(last + 1, 0.0);
    std::uint64_t tail = 0;
    for (std::size_t k = last; k-- > 0;) {
        tail += histogram[k];
        ccdf[k] = static_cast<double>(tail) / n;
    }

    const std::size_t top = std::max<std::size_t>(last, 1);
    trace.thresholds.resize(static_cast<std::size_t>(spec.n_thresholds));
    trace.overflow_prob.resize(trace.thresholds.size());
    for (std::size_t i = 0; i < trace.thresholds.size(); ++i) {
        const std::size_t k = 1 + i * (top - 1) / (trace.thresholds.size() - 1);
        trace.thresholds[i] = static_cast<double>(k) * bin_width;
        trace.overflow_prob[i] = k < ccdf.size() ? ccdf[k] : 0.0;
    }

    if (positive == 0) {
        trace.theta_hat = kInf;
        trace.fit_r2 = std::numeric_limits<double>::quiet_NaN();
        return trace;
    }

    // Tail window between the 90th and 99.9th percentiles (bin edges), never at q = 0.
    const auto percentile_edge = [&](double level) {
        std::size_t k = 1;
        while (k < ccdf.size() && ccdf[k] > 1.0 - level) ++k;
        return k;
    };
    std::size_t lo = std::max<std::size_t>(percentile_edge(0.90), 1);
    std::size_t hi = percentile_edge(0.999);
    if (hi < lo + 2) {
        // Too little mass above the 90th percentile: fall back to every edge with
        // at least 100 observations beyond it.
        lo = 1;
        hi = 1;
        while (hi + 1 < ccdf.size() && ccdf[hi + 1] * n >= 100.0) ++hi;
    }
    if (hi < lo + 2) {
        throw NumericError("queue tail too thin to estimate its decay exponent");
    }

    std::vector<double> xs;
    std::vector<double> ys;
    const std::size_t stride = std::max<std::size_t>(1, (hi - lo) / 400);
    for (std::size_t k = lo; k <= hi; k += stride) {
        if (ccdf[k] <= 0.0) break;
        xs.push_back(static_cast<double>(k) * bin_width);
        ys.push_back(std::log(ccdf[k]));
    }
    const LineFit fit = least_squares(xs, ys);
    trace.theta_hat = -fit.slope;
    trace.fit_r2 = fit.r2;
    trace.fit_lo = xs.front();
    trace.fit_hi = xs.back();
    return trace;
}

} // namespace harq_ee
