#pragma once

#include "harq_ee/fading.hpp"
#include "harq_ee/rng.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace harq_ee {

enum class HarqScheme { ChaseCombining, IncrementalRedundancy };

std::string_view to_string(HarqScheme scheme);

struct SimSpec {
    HarqScheme scheme = HarqScheme::ChaseCombining;
    FadingModel model{};
    double snr = 1.0;  ///< linear ratio
    double rate = 0.0; ///< R, bits/s/Hz per block
    int deadline = 1;  ///< M
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
    std::optional<double> theta; ///< when set, r_avg_hat is reported
    std::uint64_t chunk_size = 1u << 16;
    unsigned threads = 0; ///< 0 = thread_budget()

    void validate() const;
};

/// Raw counts; merging is associative, so chunk order never matters.
struct SimCounts {
    std::vector<std::uint64_t> success_at; ///< success_at[t - 1]: decoded at round t
    std::uint64_t outages = 0;
    std::uint64_t samples = 0;

    SimCounts& operator+=(const SimCounts& other);
};

struct SimResult {
    SimCounts counts;
    std::vector<double> empirical_pmf;
    std::vector<double> pmf_stderr;
    double outage_rate = 0.0;
    double outage_stderr = 0.0;
    double mu_hat = 0.0;
    double mu_stderr = 0.0;
    double sigma2_hat = 0.0;
    double sigma2_stderr = 0.0;
    std::optional<double> r_avg_hat;
    std::optional<double> r_avg_stderr;
};

/// One draw of the block channel power z.
double sample_z(const FadingModel& model, Rng& rng);

/// Monte Carlo estimate of the per-message transmission time distribution.
/// Every sample consumes exactly M channel draws so that CC and IR runs with
/// the same seed see identical fading realizations.
SimResult simulate(const SimSpec& spec);

/// Estimates derived from raw counts (moments through the restart formulas,
/// delta-method standard errors).
SimResult summarize(const SimCounts& counts, double rate, std::optional<double> theta);

} // namespace harq_ee
