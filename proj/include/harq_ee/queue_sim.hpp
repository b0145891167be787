#pragma once

#include "harq_ee/ee_metrics.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace harq_ee {

/// What happens to a message's R bits when it misses the HARQ deadline.
enum class AbandonPolicy {
    Requeue, ///< bits stay queued and are re-sent as a fresh message
    Drop,    ///< bits leave the buffer undelivered
};

std::string_view to_string(AbandonPolicy policy);

struct QueueSpec {
    LinkSetup link{}; ///< link.theta is the target QoS exponent
    double snr = 1.0;
    std::optional<double> rate; ///< explicit R; otherwise derived from eps
    double eps = 0.1;
    double load = 1.0; ///< arrival parameter scale relative to the solved r_avg
    std::uint64_t n_blocks = 1'000'000;
    std::uint64_t seed = 1;
    AbandonPolicy abandon = AbandonPolicy::Requeue;
    int n_thresholds = 100;

    void validate() const;
};

/// Overflow statistics of the simulated buffer.
struct QueueTrace {
    std::vector<double> thresholds;    ///< q, bits
    std::vector<double> overflow_prob; ///< Pr{Q >= q}
    double theta_hat = 0.0;            ///< fitted decay exponent per bit
    double varsigma_hat = 0.0;         ///< Pr{Q > 0}
    double fit_r2 = 0.0;
    double fit_lo = 0.0; ///< tail-fit window, bits
    double fit_hi = 0.0;

    double rate = 0.0;          ///< R used by the link
    double arrival_rate_param = 0.0;
    double mean_arrival = 0.0;  ///< offered bits per block (analytic)
    double mean_service = 0.0;  ///< analytic drain rate, bits per block
    double arrived_bits = 0.0;
    double delivered_bits = 0.0;
    double abandoned_bits = 0.0;
    std::uint64_t delivered_messages = 0;
    std::uint64_t abandoned_messages = 0;
};

/// Slotted buffer driven by the source at its solved supportable rate and
/// drained by a HARQ-CC link that runs every block. The overflow tail is fitted
/// by least squares on log Pr{Q >= q} between the 90th and 99.9th percentiles
/// of the observed queue length. Throws NumericError when the mean drift is
/// nonnegative.
QueueTrace simulate_queue(const QueueSpec& spec);

} // namespace harq_ee
