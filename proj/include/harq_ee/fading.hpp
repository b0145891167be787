#pragma once

#include <string_view>

namespace harq_ee {

enum class FadingFamily { Rayleigh, Nakagami };

/// Distribution of the per-block channel power z = |h|^2.
///
/// Rayleigh: z ~ Exp(mean_power). Nakagami-m: z ~ Gamma(m, mean_power / m).
/// Blocks are i.i.d., so a sum of t blocks is Gamma(t * shape, scale).
struct FadingModel {
    FadingFamily family = FadingFamily::Rayleigh;
    double mean_power = 1.0;
    double m_shape = 1.0; ///< ignored for Rayleigh

    static FadingModel rayleigh(double mean_power = 1.0);
    static FadingModel nakagami(double m_shape, double mean_power = 1.0);

    /// Gamma shape contributed by a single block.
    double block_shape() const;
    /// Gamma scale shared by every partial sum.
    double scale() const;

    void validate() const;
};

std::string_view to_string(FadingFamily family);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Pr{z_1 + ... + z_t <= x}. The empty sum is zero, so F_0(x) = 1 for x >= 0.
double sum_cdf(const FadingModel& model, int t, double x);

/// Density of z_1 + ... + z_t at x (t >= 1).
double sum_pdf(const FadingModel& model, int t, double x);

/// Inverse of sum_cdf in x for p in (0, 1). The result satisfies
/// |sum_cdf(model, blocks, x) - p| <= 1e-12.
double sum_quantile(const FadingModel& model, int blocks, double p);

} // namespace harq_ee
