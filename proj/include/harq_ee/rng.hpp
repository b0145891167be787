#pragma once

#include <cstdint>
#include <random>

namespace harq_ee {

/// SplitMix64 finalizer; maps (seed, stream) pairs to well-separated engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for independent stream `stream` derived from a user seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Random source for the simulators. The engine and every variate transform are
/// fully specified here, so streams are bit-identical across standard libraries
/// (the std:: distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(stream_seed(seed, stream)) {}

    /// Uniform on the open interval (0, 1).
    double uniform();
    double standard_normal();
    /// Exp(1).
    double exponential();
    /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the u^{1/shape} boost.
    double gamma(double shape);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace harq_ee
