#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace harq_ee::cli {

enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kValidationError = 2,
    kNumericError = 3,
};

/// Every parameter the command line understands. Field names mirror the long
/// flags; the JSON config file uses the flag spellings as keys.
struct RunConfig {
    std::string command;
    std::string source = "constant";
    double p11 = 0.5;
    double p22 = 0.5;
    double alpha = 0.5;
    double beta = 0.5;
    std::string fading = "rayleigh";
    double mean_power = 1.0;
    double m_shape = 2.0;
    int deadline = 1;
    double eps = 0.1;
    double theta = 0.1;
    std::string snr_grid = "1e-4:10:41";
    std::string scheme = "cc";
    std::optional<double> rate;
    double snr = 1.0;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    std::string policy = "fixed";
    std::string out;
    std::string format = "csv";
    std::uint64_t blocks = 1'000'000;
    double load = 1.0;
    std::string abandon = "requeue";
};

/// Parses "lo:hi:n" (log spacing) or "lo:hi:n:lin".
std::vector<double> parse_snr_grid(const std::string& spec);

/// Executes a parsed configuration and returns the rendered artifact (CSV or JSON).
std::string render(const RunConfig& config);

/// Full command-line entry point: parse, run, write. Diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace harq_ee::cli
